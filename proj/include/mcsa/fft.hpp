#pragma once

#include "mcsa/common.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace mcsa {

/// Forward complex DFT of a real signal (full length, any N).
inline std::vector<std::complex<double>> fft_forward(const Vector& x) {
    Eigen::FFT<double> fft;
    std::vector<double> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    return out;
}

/// Inverse complex DFT (1/N-normalized, matching fft_forward).
inline std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& X) {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.inv(out, X);
    return out;
}

}  // namespace mcsa

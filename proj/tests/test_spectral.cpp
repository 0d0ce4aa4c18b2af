#include "mcsa/spectral.hpp"
#include "mcsa/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace mcsa;

namespace {

Signal sine_at_bin(Index bin, double amplitude, double fs, Index n) {
    Signal s{Vector(n), fs};
    const double f = static_cast<double>(bin) * fs / static_cast<double>(n);
    for (Index i = 0; i < n; ++i)
        s.values[i] = amplitude * std::sin(2.0 * kPi * f * static_cast<double>(i) / fs);
    return s;
}

// Naive O(n^2) DFT magnitude oracle with the same one-sided amplitude
// normalization contract.
Vector dft_magnitude_oracle(const Vector& x) {
    const Index n = x.size();
    const Index half = n / 2;
    Vector out(half + 1);
    for (Index k = 0; k <= half; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (Index i = 0; i < n; ++i) {
            const double ang = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(i) /
                               static_cast<double>(n);
            acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        double mag = std::abs(acc) / static_cast<double>(n);
        if (k != 0 && !(n % 2 == 0 && k == half)) mag *= 2.0;
        out[k] = mag;
    }
    return out;
}

}  // namespace

TEST_CASE("fft_magnitude: bin-centered sine peaks at its amplitude") {
    const Index n = 1024;
    const Signal x = sine_at_bin(100, 1.0, 8192.0, n);
    const Spectrum s = fft_magnitude(x);
    REQUIRE(s.values.size() == n / 2 + 1);
    CHECK(s.values[100] == doctest::Approx(1.0).epsilon(1e-6));
    for (Index k = 0; k < s.values.size(); ++k)
        if (k != 100) CHECK(s.values[k] <= 1e-6);
    CHECK(s.bin_hz == doctest::Approx(8192.0 / 1024.0));
}

TEST_CASE("fft_magnitude: constant signal concentrates at DC") {
    Signal x{Vector::Constant(256, -3.0), 100.0};
    const Spectrum s = fft_magnitude(x);
    CHECK(s.values[0] == doctest::Approx(3.0).epsilon(1e-9));
    for (Index k = 1; k < s.values.size(); ++k) CHECK(s.values[k] <= 1e-9);
}

TEST_CASE("fft_magnitude: Parseval identity") {
    Rng rng(17);
    for (Index n : {256, 255}) {  // even and odd lengths
        Signal x{Vector(n), 100.0};
        for (Index i = 0; i < n; ++i) x.values[i] = rng.normal();
        const Spectrum s = fft_magnitude(x);
        // With amplitude normalization, each interior bin holds amplitude a_k,
        // contributing a_k^2/2 to the mean square; DC and Nyquist contribute
        // a_k^2.
        double spectral = 0.0;
        for (Index k = 0; k < s.values.size(); ++k) {
            const bool interior = k != 0 && !(n % 2 == 0 && k == n / 2);
            spectral += interior ? s.values[k] * s.values[k] / 2.0 : s.values[k] * s.values[k];
        }
        const double time = x.values.squaredNorm() / static_cast<double>(n);
        CHECK(spectral == doctest::Approx(time).epsilon(1e-9));
    }
}

TEST_CASE("fft_magnitude agrees with the naive DFT oracle") {
    Rng rng(23);
    for (Index n : {64, 100, 129}) {
        Signal x{Vector(n), 100.0};
        for (Index i = 0; i < n; ++i) x.values[i] = rng.normal();
        const Spectrum s = fft_magnitude(x);
        const Vector oracle = dft_magnitude_oracle(x.values);
        REQUIRE(s.values.size() == oracle.size());
        CHECK((s.values - oracle).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("welch_psd: white-noise integral approximates the variance") {
    Rng rng(29);
    const double sigma = 1.7;
    double sum_ratio = 0.0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        const Index n = 8192;
        Signal x{Vector(n), 1000.0};
        for (Index i = 0; i < n; ++i) x.values[i] = sigma * rng.normal();
        const Spectrum s = welch_psd(x, 1024, 512);
        const double integral = s.values.sum() * s.bin_hz;
        sum_ratio += integral / (sigma * sigma);
    }
    CHECK(sum_ratio / trials == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("welch_psd: constant signal puts all power at DC") {
    Signal x{Vector::Constant(2048, 2.0), 1000.0};
    const Spectrum s = welch_psd(x, 512, 256);
    Index peak = 0;
    s.values.maxCoeff(&peak);
    CHECK(peak == 0);
    // all power inside the Hann main lobe around DC, nothing beyond it
    CHECK(s.values.tail(s.values.size() - 3).maxCoeff() <= s.values[0] * 1e-9);
}

TEST_CASE("welch_psd: sine peak lands within one bin") {
    const double fs = 8192.0, f = 333.0;
    Signal x{Vector(16384), fs};
    for (Index i = 0; i < x.values.size(); ++i)
        x.values[i] = std::sin(2.0 * kPi * f * static_cast<double>(i) / fs);
    const Spectrum s = welch_psd(x, 1024, 512);
    CHECK(std::abs(dominant_frequency(s) - f) <= s.bin_hz);
}

TEST_CASE("welch_psd: precondition violations") {
    Signal x{Vector::Zero(100), 100.0};
    CHECK_THROWS_AS(welch_psd(x, 200, 0), Error);
    CHECK_THROWS_AS(welch_psd(x, 50, 50), Error);
}

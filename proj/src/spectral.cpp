#include "mcsa/spectral.hpp"

#include "mcsa/fft.hpp"

#include <cmath>

namespace mcsa {

Spectrum fft_magnitude(const Signal& x) {
    if (x.values.size() < 2) throw Error("fft_magnitude: signal length must be >= 2");
    const Index n = x.values.size();
    auto full = fft_forward(x.values);
    const Index half = n / 2;

    Spectrum s;
    s.kind = SpectrumKind::FFT;
    s.bin_hz = x.sample_rate_hz / static_cast<double>(n);
    s.values.resize(half + 1);
    for (Index k = 0; k <= half; ++k) {
        double mag = std::abs(full[static_cast<std::size_t>(k)]) / static_cast<double>(n);
        const bool interior = k != 0 && !(n % 2 == 0 && k == half);
        if (interior) mag *= 2.0;
        s.values[k] = mag;
    }
    return s;
}

Spectrum welch_psd(const Signal& x, int seg_len, int overlap) {
    const Index n = x.values.size();
    if (n < 2) throw Error("welch_psd: signal length must be >= 2");
    if (seg_len <= 0) seg_len = static_cast<int>(std::min<Index>(1024, n));
    if (seg_len > n) throw Error("welch_psd: segment longer than signal");
    if (overlap < 0) overlap = seg_len / 2;
    if (overlap >= seg_len) throw Error("welch_psd: overlap must be < segment length");

    // Periodic Hann window for the periodograms.
    Vector w(seg_len);
    for (int i = 0; i < seg_len; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                     static_cast<double>(seg_len)));
    const double win_power = w.squaredNorm();  // sum w^2

    const Index half = seg_len / 2;
    Spectrum s;
    s.kind = SpectrumKind::PSD;
    s.bin_hz = x.sample_rate_hz / static_cast<double>(seg_len);
    s.values = Vector::Zero(half + 1);

    const Index step = seg_len - overlap;
    Index n_segments = 0;
    for (Index t = 0; t + seg_len <= n; t += step) {
        Vector seg = x.values.segment(t, seg_len).cwiseProduct(w);
        auto full = fft_forward(seg);
        for (Index k = 0; k <= half; ++k) {
            const auto c = full[static_cast<std::size_t>(k)];
            double p = std::norm(c) / (x.sample_rate_hz * win_power);
            const bool interior = k != 0 && !(seg_len % 2 == 0 && k == half);
            if (interior) p *= 2.0;
            s.values[k] += p;
        }
        ++n_segments;
    }
    if (n_segments == 0) throw Error("welch_psd: no full segment fits the signal");
    s.values /= static_cast<double>(n_segments);
    return s;
}

double dominant_frequency(const Spectrum& s, bool skip_dc) {
    const Index start = skip_dc && s.values.size() > 1 ? 1 : 0;
    Index best = start;
    for (Index k = start; k < s.values.size(); ++k)
        if (s.values[k] > s.values[best]) best = k;
    return static_cast<double>(best) * s.bin_hz;
}

}  // namespace mcsa

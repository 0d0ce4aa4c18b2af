#pragma once

#include "mcsa/signal_ops.hpp"

namespace mcsa {

enum class SpectrumKind { FFT, PSD };

/// One-sided nonnegative spectrum; values[k] sits at frequency k * bin_hz.
struct Spectrum {
    Vector values;
    double bin_hz = 0.0;
    SpectrumKind kind = SpectrumKind::FFT;

    Index length() const { return values.size(); }
};

/// One-sided amplitude spectrum scaled so a pure sine of amplitude A at a bin
/// center peaks at A. Length floor(N/2)+1, bin_hz = sample_rate / N.
Spectrum fft_magnitude(const Signal& x);

/// Welch PSD: averaged Hann-windowed periodograms with density scaling, so the
/// integral over frequency approximates the signal variance.
/// seg_len <= 0 selects min(1024, N); overlap < 0 selects seg_len/2.
Spectrum welch_psd(const Signal& x, int seg_len = 0, int overlap = -1);

/// Frequency of the largest bin; skips DC by default.
double dominant_frequency(const Spectrum& s, bool skip_dc = true);

}  // namespace mcsa

#pragma once

#include "mcsa/common.hpp"

#include <vector>

namespace mcsa {

/// One channel of a record: equally sampled real values.
struct Signal {
    Vector values;
    double sample_rate_hz = 0.0;

    Index length() const { return values.size(); }
};

/// Second-order IIR notch (biquad) at f0_hz with quality q. Unity gain at DC,
/// >= 20 dB rejection at f0. Throws if f0 is outside (0, Nyquist).
Signal notch_filter(const Signal& x, double f0_hz, double q = 30.0);

/// Rotational shaft frequency resampling. Aligns the electrical supply
/// frequency of the input (shaft_freq_hz * pole_pairs) to the pseudo target
/// supply frequency by per-oscillation linear resampling; output is cropped or
/// edge-padded back to the input length.
struct RsfrParams {
    double pseudo_supply_hz = 118.0;  // target electrical supply frequency
    int pole_pairs = 1;
    double shaft_freq_hz = 0.0;  // mechanical shaft frequency of the record
};

Signal rsfr(const Signal& x, const RsfrParams& p);

/// Amplitude-invariant Park transform of a balanced three-phase set. theta is
/// the electrical angle per sample. The third-phase projection coefficients
/// are computed as the negated sum of the first two, so a common offset on all
/// phases cancels at machine precision.
struct DqSignals {
    Signal d;
    Signal q;
};

DqSignals park_transform(const Signal& ia, const Signal& ib, const Signal& ic,
                         const Vector& theta);

/// Electrical angle sequence 2*pi*f_supply*t for records without an encoder.
Vector synth_electrical_angle(Index n, double supply_freq_hz, double sample_rate_hz);

/// Least-squares local polynomial smoothing. Polynomials of degree
/// <= poly_order pass through unchanged, including at the edges. Window must
/// be odd and > poly_order.
Signal savitzky_golay(const Signal& x, int window, int poly_order);

struct WindowingParams {
    int window_len = 1024;  // s
    int overlap = 0;        // w, < s
};

struct WindowSet {
    std::vector<Signal> windows;   // each of length window_len
    std::vector<Index> offsets;    // start offset of each window
};

/// Sliding windows at offsets 0, s-w, 2(s-w), ...; every window lies fully
/// inside the signal. Count is floor((len-s)/(s-w)) + 1. Throws if len < s.
WindowSet make_windows(const Signal& x, const WindowingParams& p);

/// Subtract mean, divide by the (population) standard deviation. A constant
/// input maps to all zeros.
Signal normalize(const Signal& x);

/// Subtract the least-squares line over the sample index.
Signal detrend(const Signal& x);

/// Magnitude of the analytic signal (frequency-domain Hilbert quadrature).
Signal analytic_envelope(const Signal& x);

/// Pointwise multiply by a Hann window of the same length.
Signal window_taper(const Signal& x);

}  // namespace mcsa

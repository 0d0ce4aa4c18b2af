#include "mcsa/signal_ops.hpp"

#include "mcsa/fft.hpp"

#include <algorithm>
#include <cmath>

namespace mcsa {

namespace {

void require_signal(const Signal& x, const char* op) {
    if (x.values.size() < 2) throw Error(std::string(op) + ": signal length must be >= 2");
    if (!(x.sample_rate_hz > 0.0)) throw Error(std::string(op) + ": sample rate must be > 0");
}

// Linear interpolation at fractional index p; exact at integer positions.
double lerp_at(const Vector& x, double p) {
    const Index n = x.size();
    if (p <= 0.0) return x[0];
    if (p >= static_cast<double>(n - 1)) return x[n - 1];
    const auto i0 = static_cast<Index>(p);
    const double frac = p - static_cast<double>(i0);
    if (frac == 0.0) return x[i0];
    return x[i0] * (1.0 - frac) + x[i0 + 1] * frac;
}

}  // namespace

Signal notch_filter(const Signal& x, double f0_hz, double q) {
    require_signal(x, "notch_filter");
    const double nyquist = x.sample_rate_hz / 2.0;
    if (!(f0_hz > 0.0) || !(f0_hz < nyquist))
        throw Error("notch_filter: f0 must lie in (0, Nyquist=" + std::to_string(nyquist) + ")");
    if (!(q > 0.0)) throw Error("notch_filter: q must be > 0");

    // RBJ cookbook notch biquad, unity gain at DC.
    const double w0 = 2.0 * kPi * f0_hz / x.sample_rate_hz;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double cw = std::cos(w0);
    const double a0 = 1.0 + alpha;
    const double b0 = 1.0 / a0;
    const double b1 = -2.0 * cw / a0;
    const double b2 = 1.0 / a0;
    const double a1 = -2.0 * cw / a0;
    const double a2 = (1.0 - alpha) / a0;

    Signal out{Vector(x.values.size()), x.sample_rate_hz};
    // Initialize the state as if the signal had been at its first value
    // forever; keeps constant inputs constant up to the IIR transient.
    double x1 = x.values[0], x2 = x.values[0];
    double y1 = x.values[0], y2 = x.values[0];
    for (Index i = 0; i < x.values.size(); ++i) {
        const double xi = x.values[i];
        const double yi = b0 * xi + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        out.values[i] = yi;
        x2 = x1;
        x1 = xi;
        y2 = y1;
        y1 = yi;
    }
    return out;
}

Signal rsfr(const Signal& x, const RsfrParams& p) {
    require_signal(x, "rsfr");
    if (!(p.shaft_freq_hz > 0.0)) throw Error("rsfr: shaft_freq_hz must be > 0");
    if (p.pole_pairs < 1) throw Error("rsfr: pole_pairs must be >= 1");
    if (!(p.pseudo_supply_hz > 0.0)) throw Error("rsfr: pseudo supply frequency must be > 0");

    const double source_supply = p.shaft_freq_hz * static_cast<double>(p.pole_pairs);
    if (p.pseudo_supply_hz >= x.sample_rate_hz / 2.0)
        throw Error("rsfr: pseudo supply frequency exceeds Nyquist after resampling");

    const double ratio = p.pseudo_supply_hz / source_supply;
    const Index n = x.values.size();
    if (ratio == 1.0) return x;

    // Interpolation support vectors: one segment per electrical oscillation,
    // delimited by rising zero crossings.
    std::vector<Index> bounds;
    bounds.push_back(0);
    for (Index i = 0; i + 1 < n; ++i)
        if (x.values[i] < 0.0 && x.values[i + 1] >= 0.0 && i + 1 > bounds.back())
            bounds.push_back(i + 1);
    const bool has_crossings = bounds.size() > 1;
    const Index last_crossing = bounds.back();
    if (bounds.back() != n) bounds.push_back(n);

    // Map each boundary to the output index grid; accumulating instead of
    // rounding per segment keeps the global ratio drift-free.
    const auto out_len = static_cast<Index>(std::llround(static_cast<double>(n) / ratio));
    std::vector<double> resampled;
    resampled.reserve(static_cast<std::size_t>(std::max<Index>(out_len, 1)));
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        const auto b0 = static_cast<double>(bounds[s]);
        const auto b1 = static_cast<double>(bounds[s + 1]);
        const auto o0 = static_cast<Index>(std::llround(b0 / ratio));
        const auto o1 = static_cast<Index>(std::llround(b1 / ratio));
        if (o1 <= o0) continue;  // oscillation collapsed below one sample
        const double span = b1 - b0;
        const auto seg_len = static_cast<double>(o1 - o0);
        for (Index i = o0; i < o1; ++i) {
            const double t = static_cast<double>(i - o0) / seg_len;
            resampled.push_back(lerp_at(x.values, b0 + t * span));
        }
    }
    if (resampled.empty()) resampled.push_back(x.values[0]);

    // Ensure the output has the input length: crop, or pad by periodically
    // continuing the completed oscillations. The pad cycles the span between
    // the first and last crossing boundaries, so every seam joins two rising
    // zero crossings and the padded region keeps the pseudo frequency instead
    // of flat-lining at an arbitrary amplitude.
    Signal out{Vector(n), x.sample_rate_hz};
    const auto have = static_cast<Index>(resampled.size());
    if (have >= n) {
        for (Index i = 0; i < n; ++i) out.values[i] = resampled[static_cast<std::size_t>(i)];
        return out;
    }
    Index cycle_begin = 0, cycle_end = have;
    if (has_crossings) {
        const auto first_out = static_cast<Index>(
            std::llround(static_cast<double>(bounds[1]) / ratio));
        const auto last_out = static_cast<Index>(
            std::llround(static_cast<double>(last_crossing) / ratio));
        if (last_out > first_out && last_out <= have) {
            cycle_begin = first_out;
            cycle_end = last_out;
        }
    }
    const Index cycle_len = cycle_end - cycle_begin;
    for (Index i = 0; i < n; ++i) {
        if (i < cycle_end) {
            out.values[i] = resampled[static_cast<std::size_t>(std::min(i, have - 1))];
        } else if (cycle_len > 0) {
            out.values[i] =
                resampled[static_cast<std::size_t>(cycle_begin + (i - cycle_begin) % cycle_len)];
        } else {
            out.values[i] = resampled[static_cast<std::size_t>(have - 1)];
        }
    }
    return out;
}

Vector synth_electrical_angle(Index n, double supply_freq_hz, double sample_rate_hz) {
    Vector theta(n);
    const double step = 2.0 * kPi * supply_freq_hz / sample_rate_hz;
    for (Index i = 0; i < n; ++i) theta[i] = step * static_cast<double>(i);
    return theta;
}

DqSignals park_transform(const Signal& ia, const Signal& ib, const Signal& ic,
                         const Vector& theta) {
    const Index n = ia.values.size();
    if (ib.values.size() != n || ic.values.size() != n || theta.size() != n)
        throw Error("park_transform: phase/theta length mismatch");

    DqSignals out;
    out.d = Signal{Vector(n), ia.sample_rate_hz};
    out.q = Signal{Vector(n), ia.sample_rate_hz};
    constexpr double two_thirds = 2.0 / 3.0;
    constexpr double shift = 2.0 * kPi / 3.0;
    for (Index i = 0; i < n; ++i) {
        const double c1 = std::cos(theta[i]);
        const double c2 = std::cos(theta[i] - shift);
        const double c3 = -(c1 + c2);  // == cos(theta + shift); exact zero-sequence sum
        const double s1 = std::sin(theta[i]);
        const double s2 = std::sin(theta[i] - shift);
        const double s3 = -(s1 + s2);
        out.d.values[i] =
            two_thirds * (ia.values[i] * c1 + ib.values[i] * c2 + ic.values[i] * c3);
        out.q.values[i] =
            -two_thirds * (ia.values[i] * s1 + ib.values[i] * s2 + ic.values[i] * s3);
    }
    return out;
}

Signal savitzky_golay(const Signal& x, int window, int poly_order) {
    require_signal(x, "savitzky_golay");
    if (window % 2 == 0) throw Error("savitzky_golay: window must be odd");
    if (poly_order >= window) throw Error("savitzky_golay: poly_order must be < window");
    if (poly_order < 0) throw Error("savitzky_golay: poly_order must be >= 0");
    const Index n = x.values.size();
    if (static_cast<Index>(window) > n)
        throw Error("savitzky_golay: window longer than signal");

    const int h = window / 2;
    // Design matrix over offsets -h..h; row e of W evaluates the local
    // least-squares polynomial at offset e, so edge samples reuse the
    // boundary-anchored window and stay polynomial-exact.
    Matrix a(window, poly_order + 1);
    for (int r = 0; r < window; ++r) {
        double v = 1.0;
        for (int c = 0; c <= poly_order; ++c) {
            a(r, c) = v;
            v *= static_cast<double>(r - h);
        }
    }
    const Matrix pinv = (a.transpose() * a).ldlt().solve(a.transpose());
    Matrix w(window, window);  // row = evaluation offset e + h
    for (int e = -h; e <= h; ++e) {
        Eigen::RowVectorXd basis(poly_order + 1);
        double v = 1.0;
        for (int c = 0; c <= poly_order; ++c) {
            basis(c) = v;
            v *= static_cast<double>(e);
        }
        w.row(e + h) = basis * pinv;
    }

    Signal out{Vector(n), x.sample_rate_hz};
    for (Index i = 0; i < n; ++i) {
        Index start = i - h;
        int e = 0;
        if (start < 0) {
            e = static_cast<int>(start);
            start = 0;
        } else if (start + window > n) {
            e = static_cast<int>(start + window - n);
            start = n - window;
        }
        double acc = 0.0;
        for (int j = 0; j < window; ++j) acc += w(e + h, j) * x.values[start + j];
        out.values[i] = acc;
    }
    return out;
}

WindowSet make_windows(const Signal& x, const WindowingParams& p) {
    if (p.window_len < 2) throw Error("make_windows: window length must be >= 2");
    if (p.overlap < 0 || p.overlap >= p.window_len)
        throw Error("make_windows: overlap must satisfy 0 <= w < s");
    const Index n = x.values.size();
    const Index s = p.window_len;
    if (n < s) throw Error("make_windows: signal shorter than window");

    const Index step = s - p.overlap;
    WindowSet out;
    for (Index t = 0; t + s <= n; t += step) {
        out.windows.push_back(Signal{x.values.segment(t, s), x.sample_rate_hz});
        out.offsets.push_back(t);
    }
    return out;
}

Signal normalize(const Signal& x) {
    require_signal(x, "normalize");
    const double mean = x.values.mean();
    const double var = (x.values.array() - mean).square().mean();
    Signal out{Vector(x.values.size()), x.sample_rate_hz};
    if (var == 0.0) {
        out.values.setZero();
    } else {
        out.values = (x.values.array() - mean) / std::sqrt(var);
    }
    return out;
}

Signal detrend(const Signal& x) {
    require_signal(x, "detrend");
    const Index n = x.values.size();
    const double t_mean = static_cast<double>(n - 1) / 2.0;
    const double x_mean = x.values.mean();
    double num = 0.0, den = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double dt = static_cast<double>(i) - t_mean;
        num += dt * (x.values[i] - x_mean);
        den += dt * dt;
    }
    const double slope = den > 0.0 ? num / den : 0.0;
    Signal out{Vector(n), x.sample_rate_hz};
    for (Index i = 0; i < n; ++i)
        out.values[i] = x.values[i] - (x_mean + slope * (static_cast<double>(i) - t_mean));
    return out;
}

Signal analytic_envelope(const Signal& x) {
    require_signal(x, "analytic_envelope");
    const Index n = x.values.size();
    auto spectrum = fft_forward(x.values);
    // One-sided doubling: keep DC (and Nyquist for even n), double the
    // positive frequencies, zero the negative half.
    const Index last_positive = n % 2 == 0 ? n / 2 - 1 : n / 2;
    for (Index k = 1; k < n; ++k) {
        auto& c = spectrum[static_cast<std::size_t>(k)];
        if (k <= last_positive)
            c *= 2.0;
        else if (n % 2 == 1 || k != n / 2)
            c = 0.0;
    }
    auto analytic = fft_inverse(spectrum);
    Signal out{Vector(n), x.sample_rate_hz};
    for (Index i = 0; i < n; ++i) out.values[i] = std::abs(analytic[static_cast<std::size_t>(i)]);
    return out;
}

Signal window_taper(const Signal& x) {
    require_signal(x, "window_taper");
    const Index n = x.values.size();
    Vector w(n);
    // sin^2 form mirrored about the center: endpoints exactly 0, midpoint of
    // an odd-length window exactly 1.
    for (Index i = 0; i <= (n - 1) / 2; ++i) {
        const double s = std::sin(kPi * static_cast<double>(i) / static_cast<double>(n - 1));
        w[i] = s * s;
        w[n - 1 - i] = w[i];
    }
    return Signal{x.values.cwiseProduct(w), x.sample_rate_hz};
}

}  // namespace mcsa

#include "mcsa/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mcsa {

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "mean",          "median",         "std",           "variance",
        "rms",           "min",            "max",           "peak_to_peak",
        "abs_mean",      "skewness",       "kurtosis",      "crest_factor",
        "shape_factor",  "impulse_factor", "margin_factor", "clearance_factor",
        "energy",        "log_energy",     "entropy",       "zero_crossings",
        "slope",         "iqr",            "p05",           "p95"};
    return names;
}

namespace {

// Type-7 quantile (linear interpolation between order statistics).
double quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

Vector extract_features(const Vector& x, bool is_spectrum) {
    const Index n = x.size();
    if (n < 4) throw Error("extract_features: length must be >= 4");
    const auto nd = static_cast<double>(n);

    const double mean = x.mean();
    const double minv = x.minCoeff();
    const double maxv = x.maxCoeff();
    const bool constant = minv == maxv;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;

    const double variance = m2;
    const double stddev = std::sqrt(variance);
    const double energy = x.squaredNorm();
    const double rms = std::sqrt(energy / nd);
    const double abs_mean = x.cwiseAbs().mean();
    const double abs_peak = x.cwiseAbs().maxCoeff();

    const double skewness = constant || m2 == 0.0 ? 0.0 : m3 / std::pow(m2, 1.5);
    const double kurtosis = constant || m2 == 0.0 ? 0.0 : m4 / (m2 * m2) - 3.0;

    auto ratio = [&](double num, double den) {
        return constant || den == 0.0 ? 0.0 : num / den;
    };
    const double crest = ratio(abs_peak, rms);
    const double shape = ratio(rms, abs_mean);
    const double impulse = ratio(abs_peak, abs_mean);
    double sqrt_mean = 0.0, cbrt_mean = 0.0;
    for (Index i = 0; i < n; ++i) {
        sqrt_mean += std::sqrt(std::abs(x[i]));
        cbrt_mean += std::cbrt(std::abs(x[i]));
    }
    sqrt_mean /= nd;
    cbrt_mean /= nd;
    const double margin = ratio(abs_peak, sqrt_mean * sqrt_mean);
    const double clearance = ratio(abs_peak, cbrt_mean * cbrt_mean * cbrt_mean);

    double log_energy = 0.0;
    for (Index i = 0; i < n; ++i)
        if (x[i] != 0.0) log_energy += std::log(x[i] * x[i]);

    // Shannon entropy of the |x| histogram, 16 equal-width bins.
    double entropy = 0.0;
    {
        constexpr int kBins = 16;
        double lo = std::abs(x[0]), hi = std::abs(x[0]);
        for (Index i = 1; i < n; ++i) {
            lo = std::min(lo, std::abs(x[i]));
            hi = std::max(hi, std::abs(x[i]));
        }
        if (hi > lo) {
            std::array<double, kBins> counts{};
            for (Index i = 0; i < n; ++i) {
                auto b = static_cast<int>((std::abs(x[i]) - lo) / (hi - lo) *
                                          static_cast<double>(kBins));
                counts[static_cast<std::size_t>(std::min(b, kBins - 1))] += 1.0;
            }
            for (double c : counts)
                if (c > 0.0) {
                    const double p = c / nd;
                    entropy -= p * std::log(p);
                }
        }
    }

    double zero_crossings = 0.0;
    if (!is_spectrum)
        for (Index i = 0; i + 1 < n; ++i)
            if (x[i] * x[i + 1] < 0.0) zero_crossings += 1.0;

    // Least-squares slope over the sample index.
    double slope = 0.0;
    {
        const double t_mean = (nd - 1.0) / 2.0;
        double num = 0.0, den = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double dt = static_cast<double>(i) - t_mean;
            num += dt * (x[i] - mean);
            den += dt * dt;
        }
        slope = den > 0.0 ? num / den : 0.0;
    }

    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double median = quantile(sorted, 0.5);
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    const double p05 = quantile(sorted, 0.05);
    const double p95 = quantile(sorted, 0.95);

    Vector out(kFeatureCount);
    out << mean, median, stddev, variance, rms, minv, maxv, maxv - minv, abs_mean, skewness,
        kurtosis, crest, shape, impulse, margin, clearance, energy, log_energy, entropy,
        zero_crossings, slope, iqr, p05, p95;
    return out;
}

FeatureMatrix FeatureMatrix::subset(const std::vector<Index>& row_ids) const {
    FeatureMatrix out;
    out.columns = columns;
    out.values.resize(static_cast<Index>(row_ids.size()), values.cols());
    out.labels.reserve(row_ids.size());
    out.serials.reserve(row_ids.size());
    out.conditions.reserve(row_ids.size());
    out.record_ids.reserve(row_ids.size());
    Index r = 0;
    for (Index id : row_ids) {
        out.values.row(r++) = values.row(id);
        out.labels.push_back(labels[static_cast<std::size_t>(id)]);
        out.serials.push_back(serials[static_cast<std::size_t>(id)]);
        out.conditions.push_back(conditions[static_cast<std::size_t>(id)]);
        out.record_ids.push_back(record_ids[static_cast<std::size_t>(id)]);
    }
    return out;
}

std::vector<Index> FeatureMatrix::rows_with_serial_in(const std::set<std::string>& keep) const {
    std::vector<Index> out;
    for (Index r = 0; r < rows(); ++r)
        if (keep.count(serials[static_cast<std::size_t>(r)])) out.push_back(r);
    return out;
}

std::uint64_t FeatureMatrix::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& c : columns) h = fnv1a(c, h);
    for (Index r = 0; r < rows(); ++r) {
        h = fnv1a(serials[static_cast<std::size_t>(r)], h);
        h = fnv1a(static_cast<double>(labels[static_cast<std::size_t>(r)]), h);
        for (Index c = 0; c < cols(); ++c) h = fnv1a(values(r, c), h);
    }
    return h;
}

void save_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CSV: " + path.string());
    for (const auto& c : m.columns) out << c << ',';
    out << "label,serial,condition\n";
    out.precision(17);
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) out << m.values(r, c) << ',';
        out << m.labels[static_cast<std::size_t>(r)] << ','
            << m.serials[static_cast<std::size_t>(r)] << ','
            << m.conditions[static_cast<std::size_t>(r)].describe() << '\n';
    }
}

}  // namespace mcsa

#pragma once

#include "mcsa/spectral.hpp"
#include "mcsa/types.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace mcsa {

inline constexpr int kFeatureCount = 24;

/// Canonical feature order. Ratio features (crest/shape/impulse/margin/
/// clearance) and the moment ratios return 0 on constant input.
const std::array<std::string, kFeatureCount>& feature_names();

/// 24 statistical features of a value sequence. is_spectrum pins the
/// zero-crossing count to 0 for one-sided spectra. Length must be >= 4.
Vector extract_features(const Vector& values, bool is_spectrum);

inline Vector extract_features(const Signal& x) { return extract_features(x.values, false); }
inline Vector extract_features(const Spectrum& s) { return extract_features(s.values, true); }

/// Windows-as-rows feature table with per-row provenance (label, motor serial,
/// working condition, source record).
struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> columns;
    std::vector<int> labels;  // 0 = healthy, 1 = faulty
    std::vector<std::string> serials;
    std::vector<WorkingCondition> conditions;
    std::vector<int> record_ids;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }

    FeatureMatrix subset(const std::vector<Index>& row_ids) const;
    std::vector<Index> rows_with_serial_in(const std::set<std::string>& serials) const;
    std::uint64_t fingerprint() const;
};

/// CSV with a header row: feature columns + label + serial + condition.
void save_csv(const FeatureMatrix& m, const std::filesystem::path& path);

}  // namespace mcsa

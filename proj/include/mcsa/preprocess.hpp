#pragma once

#include "mcsa/features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mcsa {

enum class ScalingMethod { MinMax01, Standardize, Robust };

std::string to_string(ScalingMethod m);
ScalingMethod scaling_from_string(const std::string& s);

/// Per-column affine map learned on training rows only. Transforming unseen
/// rows may leave the declared range; constant columns map to a fixed fill
/// (0.5 for min-max, 0 otherwise).
struct FittedScaler {
    ScalingMethod method = ScalingMethod::MinMax01;
    Vector offset;
    Vector scale;  // 0 marks a degenerate (constant) column
    std::uint64_t fitted_on = 0;

    Matrix transform(const Matrix& x) const;
};

FittedScaler fit_scaler(const FeatureMatrix& m, ScalingMethod method);

enum class ReducerMethod { None, LowVariance, PCA, SFS, UFS, MRMR };

std::string to_string(ReducerMethod m);
ReducerMethod reducer_from_string(const std::string& s);

/// Column selection or projection learned on training rows only.
struct FittedReducer {
    ReducerMethod method = ReducerMethod::None;
    std::vector<int> columns;  // selection-based reducers, in selection order
    Matrix projection;         // PCA components as columns, orthonormal
    Vector center;             // PCA train-mean
    bool all_constant = false;
    std::uint64_t fitted_on = 0;

    Matrix transform(const Matrix& x) const;
    std::vector<std::string> transformed_columns(const std::vector<std::string>& in) const;
    Index out_cols(Index in_cols) const;
};

/// Drops columns whose training variance is <= threshold; the highest-variance
/// column always survives.
FittedReducer drop_low_variance(const FeatureMatrix& m, double threshold = 1e-12);

/// PCA / UFS / mRMR / SFS to exactly k output columns, fit on training rows.
/// seed drives only the SFS probe fold assignment.
FittedReducer fit_reducer(const FeatureMatrix& m, ReducerMethod method, int k,
                          std::uint64_t seed);

/// Full greedy selection order for UFS/mRMR/SFS (prefix = fit at smaller k);
/// used to score many k values without refitting.
std::vector<int> selection_path(const FeatureMatrix& m, ReducerMethod method, int k_max,
                                std::uint64_t seed);

}  // namespace mcsa

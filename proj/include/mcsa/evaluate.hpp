#pragma once

#include "mcsa/pipeline.hpp"

namespace mcsa {

/// Surrogate mode prices a plan with a deterministic work model so artifacts
/// are byte-identical across runs; Wall measures real per-fold seconds.
enum class CostMode { Surrogate, Wall };

/// Per-chromosome objectives, both minimized. A failed pipeline execution
/// yields cv_error 1 and a prohibitive cost so evolution stays total.
struct FitnessRecord {
    double cv_error = 1.0;
    double cost = 0.0;
    double cv_std = 0.0;
    bool failed = false;

    nlohmann::json to_json() const;
    static FitnessRecord from_json(const nlohmann::json& j);
};

/// Deterministic cost model: per-window work of the active stages plus the
/// classifier training effort, in arbitrary units.
double surrogate_cost(const PipelinePlan& plan, Index n_windows, Index n_columns);

/// Grouped-CV fitness: per (repeat, fold) all fitted stages are fit on the
/// training-fold windows only and scored on the held-out fold's windows.
FitnessRecord evaluate_plan(const PipelinePlan& plan, const Dataset& source,
                            const std::vector<GroupedSplit>& folds, std::uint64_t seed,
                            CostMode mode);

/// Same, reusing a pre-extracted feature table (extraction is row-local, so
/// this is leakage-free).
FitnessRecord evaluate_plan_features(const PipelinePlan& plan, const FeatureMatrix& features,
                                     const std::vector<GroupedSplit>& folds, std::uint64_t seed,
                                     CostMode mode);

}  // namespace mcsa

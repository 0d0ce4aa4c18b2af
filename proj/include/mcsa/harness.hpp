#pragma once

#include "mcsa/artifact.hpp"

namespace mcsa {

/// Source-to-target transfer outcome of one pipeline: grouped CV on the
/// source training serials, accuracy on held-out source serials, and accuracy
/// of the unmodified fitted pipeline on the same serials at the target
/// condition.
struct TransferReport {
    WorkingCondition source_condition;
    WorkingCondition target_condition;
    double source_cv_accuracy = 0.0;
    double source_cv_std = 0.0;
    double source_holdout_accuracy = 0.0;
    double target_accuracy = 0.0;
    double accuracy_impact = 0.0;  // target - source holdout
    double source_holdout_record_accuracy = 0.0;
    double target_record_accuracy = 0.0;
    std::string plan_summary;

    nlohmann::json to_json() const;
};

struct ComparisonRow {
    std::string method;
    int k = 0;  // selected feature count; 0 when not applicable
    double cv_accuracy = 0.0;
    double holdout_accuracy = 0.0;
    double target_accuracy = 0.0;
    double transfer_delta = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double max_difference = 0.0;  // max - min of the compared accuracies

    nlohmann::json to_json() const;
};

/// The fixed reference pipeline of the baseline study: raw channel,
/// non-overlapping 1024-sample windows, FFT + time features, min-max scaling,
/// default gradient boosting. Shared definition with baseline_chromosome.
PipelinePlan baseline_plan();

/// Group-aware, class-stratified holdout split by motor serial.
std::pair<Dataset, Dataset> holdout_split(const Dataset& d, double fraction,
                                          std::uint64_t seed);

/// Fits on source training serials only, then scores source holdout and the
/// holdout serials' records at the target condition without any refitting.
TransferReport evaluate_transfer(const PipelinePlan& plan, const Dataset& source,
                                 const Dataset& target, std::uint64_t seed,
                                 double holdout_fraction = 0.2);

/// Feature-reducer study: per method (PCA/SFS/UFS/mRMR), best k in
/// [k_min, k_max] by source CV, plus the transfer delta of the winning plan.
ComparisonReport compare_reducers(const Dataset& source, const Dataset& target,
                                  std::uint64_t seed, int k_min = 2, int k_max = 24);

/// Classifier study: identical fixed preprocessing, per-classifier genetic
/// hyperparameter search at the given budget, holdout accuracies + max diff.
ComparisonReport compare_classifiers(const Dataset& source, std::uint64_t seed,
                                     const EvolveConfig& budget);

std::string render_transfer_table(const std::vector<TransferReport>& reports);
std::string render_comparison_table(const ComparisonReport& report, const std::string& title);

}  // namespace mcsa

#include "mcsa/evaluate.hpp"

#include "mcsa/rng.hpp"

#include <chrono>
#include <cmath>

namespace mcsa {

using nlohmann::json;

json FitnessRecord::to_json() const {
    json j;
    j["cv_error"] = cv_error;
    j["cost"] = cost;
    j["cv_std"] = cv_std;
    j["failed"] = failed;
    return j;
}

FitnessRecord FitnessRecord::from_json(const json& j) {
    FitnessRecord f;
    f.cv_error = j.at("cv_error").get<double>();
    f.cost = j.at("cost").get<double>();
    f.cv_std = j.at("cv_std").get<double>();
    f.failed = j.at("failed").get<bool>();
    return f;
}

double surrogate_cost(const PipelinePlan& plan, Index n_windows, Index n_columns) {
    double per_window = 1.0;
    switch (plan.stage_a) {
        case StageASelect::Raw: break;
        case StageASelect::Notch: per_window += 0.5; break;
        case StageASelect::Rsfr: per_window += 1.5; break;
        case StageASelect::Park: per_window += 1.0; break;
    }
    if (plan.savgol_on) per_window += 0.5;
    if (plan.normalize_on) per_window += 0.1;
    if (plan.detrend_on) per_window += 0.1;
    if (plan.envelope_on) per_window += 1.0;
    if (plan.taper_on) per_window += 0.1;
    per_window += plan.spectral == SpectrumKind::FFT ? 1.0 : 2.0;
    if (plan.time_features_on) per_window += 0.5;
    if (plan.clean_low_variance) per_window += 0.1;

    const double scale = static_cast<double>(plan.window_len) / 1024.0;
    double cost = static_cast<double>(n_windows) * per_window * scale;

    switch (plan.reducer) {
        case ReducerMethod::None:
        case ReducerMethod::LowVariance: break;
        case ReducerMethod::PCA: cost += 2.0 * static_cast<double>(n_columns); break;
        case ReducerMethod::UFS: cost += 1.0 * static_cast<double>(n_columns); break;
        case ReducerMethod::MRMR: cost += 4.0 * static_cast<double>(n_columns); break;
        case ReducerMethod::SFS:
            cost += 40.0 * static_cast<double>(n_columns) + 0.5 * plan.reducer_k;
            break;
    }

    const auto& cl = plan.classifier;
    switch (cl.algorithm) {
        case Algorithm::GradientBoosting:
            cost += cl.param("estimators") * cl.param("max_leaves") * 0.05;
            break;
        case Algorithm::RandomForest:
        case Algorithm::ExtraTrees:
            cost += cl.param("n_trees") * 1.0;
            break;
        case Algorithm::LogisticRegression:
            cost += 0.5;
            break;
        case Algorithm::KNearest:
            cost += static_cast<double>(n_windows) * 0.01;
            break;
    }
    return cost / 100.0;
}

FitnessRecord evaluate_plan_features(const PipelinePlan& plan, const FeatureMatrix& features,
                                     const std::vector<GroupedSplit>& folds, std::uint64_t seed,
                                     CostMode mode) {
    FitnessRecord out;
    std::vector<double> accuracies;
    double wall_seconds = 0.0;
    int timed_folds = 0;

    try {
        for (std::size_t rep = 0; rep < folds.size(); ++rep) {
            const auto& split = folds[rep];
            for (int f = 0; f < split.k; ++f) {
                const auto test_serials = split.fold_serials(f);
                std::vector<Index> train_rows, test_rows;
                for (Index r = 0; r < features.rows(); ++r) {
                    const auto& serial = features.serials[static_cast<std::size_t>(r)];
                    (test_serials.count(serial) ? test_rows : train_rows).push_back(r);
                }
                if (test_rows.empty() || train_rows.empty()) continue;

                const auto t0 = std::chrono::steady_clock::now();
                FittedPipeline fp = fit_pipeline_rows(
                    plan, features, train_rows,
                    derive_seed(seed, "fold", rep * static_cast<std::size_t>(split.k) +
                                                  static_cast<std::size_t>(f)));
                const auto preds = apply_pipeline_rows(fp, features.subset(test_rows));
                const auto t1 = std::chrono::steady_clock::now();
                wall_seconds += std::chrono::duration<double>(t1 - t0).count();
                ++timed_folds;
                accuracies.push_back(preds.window_accuracy());
            }
        }
    } catch (const Error&) {
        out.cv_error = 1.0;
        out.cost = 1e9;
        out.failed = true;
        return out;
    }
    if (accuracies.empty()) {
        out.cv_error = 1.0;
        out.cost = 1e9;
        out.failed = true;
        return out;
    }

    double mean = 0.0;
    for (double a : accuracies) mean += a;
    mean /= static_cast<double>(accuracies.size());
    double var = 0.0;
    for (double a : accuracies) var += (a - mean) * (a - mean);
    var /= static_cast<double>(accuracies.size());

    out.cv_error = 1.0 - mean;
    out.cv_std = std::sqrt(var);
    out.cost = mode == CostMode::Surrogate
                   ? surrogate_cost(plan, features.rows(), features.cols())
                   : wall_seconds / static_cast<double>(timed_folds);
    return out;
}

FitnessRecord evaluate_plan(const PipelinePlan& plan, const Dataset& source,
                            const std::vector<GroupedSplit>& folds, std::uint64_t seed,
                            CostMode mode) {
    FeatureMatrix features;
    try {
        features = extract_plan_features(plan, source);
    } catch (const Error&) {
        FitnessRecord out;
        out.cv_error = 1.0;
        out.cost = 1e9;
        out.failed = true;
        return out;
    }
    return evaluate_plan_features(plan, features, folds, seed, mode);
}

}  // namespace mcsa

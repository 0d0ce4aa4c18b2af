#pragma once

#include "mcsa/classifier.hpp"
#include "mcsa/folds.hpp"
#include "mcsa/preprocess.hpp"
#include "mcsa/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mcsa {

inline constexpr const char* kToolVersion = "0.1.0";

enum class StageASelect { Raw, Notch, Rsfr, Park };

std::string to_string(StageASelect s);
StageASelect stage_a_from_string(const std::string& s);

/// Fully decoded, executable pipeline: stage A (source preprocessing), stage B
/// (windowing + per-window transforms), stage C (representation, features,
/// cleaning, scaling, reduction) and stage D (classifier). Every field is
/// populated even when its stage is inactive, so plans round-trip through the
/// chromosome codec.
struct PipelinePlan {
    StageASelect stage_a = StageASelect::Raw;
    double notch_hz = 16.6;           // a_10
    double pseudo_supply_hz = 118.0;  // a_20, target supply frequency for RSFR
    bool savgol_on = false;           // a_52
    int savgol_window = 5;            // a_50
    int savgol_order = 2;             // a_51

    int window_len = 1024;     // b_10
    int overlap = 0;           // b_11
    bool normalize_on = false; // b_20
    bool detrend_on = false;   // b_30
    bool envelope_on = false;  // b_40
    bool taper_on = false;     // b_50

    SpectrumKind spectral = SpectrumKind::FFT;  // c_10
    bool time_features_on = false;              // c_20
    bool clean_low_variance = false;            // c_30
    ScalingMethod scaling = ScalingMethod::MinMax01;  // c_40
    ReducerMethod reducer = ReducerMethod::None;      // c_50
    int reducer_k = 8;                                // c_51

    ClassifierSpec classifier = ClassifierSpec::defaults(Algorithm::GradientBoosting);

    std::vector<std::string> repairs;  // decode-time feasibility repairs

    std::string describe() const;
    nlohmann::json to_json() const;
    static PipelinePlan from_json(const nlohmann::json& j);
};

bool operator==(const PipelinePlan& a, const PipelinePlan& b);

/// Stage A + Savitzky-Golay applied to one record; Park consumes all three
/// phases, everything else works on the first channel.
Signal stage_a_select(const PhaseCurrentRecord& r, const PipelinePlan& plan);

/// Stages A-C2 for a whole dataset: one feature row per window, with label,
/// serial, condition and source-record provenance. Pure and fold-independent
/// (no cross-row statistics), so CV can reuse one extraction.
FeatureMatrix extract_plan_features(const PipelinePlan& plan, const Dataset& d);

/// The fitted stages of a plan (cleaning, scaling, reduction, classifier) plus
/// enough metadata to apply them to fresh records without refitting.
struct FittedPipeline {
    PipelinePlan plan;
    std::vector<std::string> feature_columns;
    FittedReducer cleaner;
    FittedScaler scaler;
    FittedReducer reducer;
    FittedModel model;
    double training_accuracy = 0.0;
    std::uint64_t trained_on = 0;

    Matrix transform(const Matrix& features) const;

    nlohmann::json to_json() const;
    static FittedPipeline from_json(const nlohmann::json& j);
};

/// Fit every fitted stage on the given rows of a pre-extracted feature table.
FittedPipeline fit_pipeline_rows(const PipelinePlan& plan, const FeatureMatrix& features,
                                 const std::vector<Index>& train_rows, std::uint64_t seed);

FittedPipeline fit_pipeline(const PipelinePlan& plan, const Dataset& train, std::uint64_t seed);

/// Window-level predictions plus record-level majority votes.
struct PipelinePredictions {
    std::vector<int> window_pred;
    Vector window_score;
    std::vector<int> window_label;
    std::vector<int> window_record;
    std::vector<std::string> window_serial;
    std::vector<int> record_ids;   // distinct, in first-seen order
    std::vector<int> record_pred;  // majority vote, ties by mean score
    std::vector<int> record_label;

    double window_accuracy() const;
    double record_accuracy() const;
};

PipelinePredictions apply_pipeline_rows(const FittedPipeline& p, const FeatureMatrix& rows);
PipelinePredictions apply_pipeline(const FittedPipeline& p, const Dataset& d);

}  // namespace mcsa

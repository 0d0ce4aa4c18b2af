#include "mcsa/pipeline.hpp"

#include "mcsa/rng.hpp"

#include <algorithm>
#include <sstream>

namespace mcsa {

using nlohmann::json;

std::string to_string(StageASelect s) {
    switch (s) {
        case StageASelect::Raw: return "raw";
        case StageASelect::Notch: return "notch";
        case StageASelect::Rsfr: return "rsfr";
        case StageASelect::Park: return "park";
    }
    throw Error("unknown stage A selection id");
}

StageASelect stage_a_from_string(const std::string& s) {
    if (s == "raw") return StageASelect::Raw;
    if (s == "notch") return StageASelect::Notch;
    if (s == "rsfr") return StageASelect::Rsfr;
    if (s == "park") return StageASelect::Park;
    throw Error("unknown stage A selection '" + s + "'");
}

std::string PipelinePlan::describe() const {
    std::ostringstream os;
    os << to_string(stage_a);
    if (stage_a == StageASelect::Notch) os << "(" << notch_hz << "Hz)";
    if (stage_a == StageASelect::Rsfr) os << "(" << pseudo_supply_hz << "Hz)";
    if (savgol_on) os << "+savgol(" << savgol_window << "," << savgol_order << ")";
    os << " | win(" << window_len << "," << overlap << ")";
    if (normalize_on) os << "+norm";
    if (detrend_on) os << "+detrend";
    if (envelope_on) os << "+env";
    if (taper_on) os << "+taper";
    os << " | " << (spectral == SpectrumKind::FFT ? "fft" : "psd");
    if (time_features_on) os << "+time";
    if (clean_low_variance) os << "+clean";
    os << "/" << to_string(scaling);
    if (reducer != ReducerMethod::None) os << "/" << to_string(reducer) << "(" << reducer_k << ")";
    os << " | " << to_string(classifier.algorithm);
    return os.str();
}

json PipelinePlan::to_json() const {
    json j;
    j["stage_a"] = to_string(stage_a);
    j["notch_hz"] = notch_hz;
    j["pseudo_supply_hz"] = pseudo_supply_hz;
    j["savgol_on"] = savgol_on;
    j["savgol_window"] = savgol_window;
    j["savgol_order"] = savgol_order;
    j["window_len"] = window_len;
    j["overlap"] = overlap;
    j["normalize_on"] = normalize_on;
    j["detrend_on"] = detrend_on;
    j["envelope_on"] = envelope_on;
    j["taper_on"] = taper_on;
    j["spectral"] = spectral == SpectrumKind::FFT ? "fft" : "psd";
    j["time_features_on"] = time_features_on;
    j["clean_low_variance"] = clean_low_variance;
    j["scaling"] = to_string(scaling);
    j["reducer"] = to_string(reducer);
    j["reducer_k"] = reducer_k;
    j["classifier"] = classifier.to_json();
    j["repairs"] = repairs;
    return j;
}

PipelinePlan PipelinePlan::from_json(const json& j) {
    PipelinePlan p;
    p.stage_a = stage_a_from_string(j.at("stage_a").get<std::string>());
    p.notch_hz = j.at("notch_hz").get<double>();
    p.pseudo_supply_hz = j.at("pseudo_supply_hz").get<double>();
    p.savgol_on = j.at("savgol_on").get<bool>();
    p.savgol_window = j.at("savgol_window").get<int>();
    p.savgol_order = j.at("savgol_order").get<int>();
    p.window_len = j.at("window_len").get<int>();
    p.overlap = j.at("overlap").get<int>();
    p.normalize_on = j.at("normalize_on").get<bool>();
    p.detrend_on = j.at("detrend_on").get<bool>();
    p.envelope_on = j.at("envelope_on").get<bool>();
    p.taper_on = j.at("taper_on").get<bool>();
    p.spectral = j.at("spectral").get<std::string>() == "fft" ? SpectrumKind::FFT
                                                              : SpectrumKind::PSD;
    p.time_features_on = j.at("time_features_on").get<bool>();
    p.clean_low_variance = j.at("clean_low_variance").get<bool>();
    p.scaling = scaling_from_string(j.at("scaling").get<std::string>());
    p.reducer = reducer_from_string(j.at("reducer").get<std::string>());
    p.reducer_k = j.at("reducer_k").get<int>();
    p.classifier = ClassifierSpec::from_json(j.at("classifier"));
    p.repairs = j.at("repairs").get<std::vector<std::string>>();
    return p;
}

bool operator==(const PipelinePlan& a, const PipelinePlan& b) {
    return a.to_json() == b.to_json();
}

Signal stage_a_select(const PhaseCurrentRecord& r, const PipelinePlan& plan) {
    Signal working;
    switch (plan.stage_a) {
        case StageASelect::Raw:
            working = Signal{r.channels.at(0), r.sample_rate_hz};
            break;
        case StageASelect::Notch:
            working = notch_filter(Signal{r.channels.at(0), r.sample_rate_hz}, plan.notch_hz);
            break;
        case StageASelect::Rsfr: {
            RsfrParams p;
            p.pseudo_supply_hz = plan.pseudo_supply_hz;
            p.pole_pairs = r.motor.pole_pairs;
            p.shaft_freq_hz = r.shaft_freq_hz;
            working = rsfr(Signal{r.channels.at(0), r.sample_rate_hz}, p);
            break;
        }
        case StageASelect::Park: {
            if (r.channels.size() < 3)
                throw Error("stage A: Park transform needs 3 channels, record has " +
                            std::to_string(r.channels.size()));
            const double supply =
                r.shaft_freq_hz * static_cast<double>(r.motor.pole_pairs);
            const Vector theta =
                synth_electrical_angle(r.length(), supply, r.sample_rate_hz);
            auto dq = park_transform(Signal{r.channels[0], r.sample_rate_hz},
                                     Signal{r.channels[1], r.sample_rate_hz},
                                     Signal{r.channels[2], r.sample_rate_hz}, theta);
            working = std::move(dq.d);
            break;
        }
    }
    if (plan.savgol_on)
        working = savitzky_golay(working, plan.savgol_window, plan.savgol_order);
    return working;
}

FeatureMatrix extract_plan_features(const PipelinePlan& plan, const Dataset& d) {
    if (d.records.empty()) throw Error("extract_plan_features: empty dataset");

    FeatureMatrix out;
    const auto& names = feature_names();
    const std::string spec_prefix = plan.spectral == SpectrumKind::FFT ? "fft_" : "psd_";
    for (const auto& n : names) out.columns.push_back(spec_prefix + n);
    if (plan.time_features_on)
        for (const auto& n : names) out.columns.push_back("time_" + n);

    std::vector<Vector> rows;
    for (std::size_t ri = 0; ri < d.records.size(); ++ri) {
        const auto& rec = d.records[ri];
        Signal working = stage_a_select(rec, plan);
        WindowSet ws = make_windows(working, WindowingParams{plan.window_len, plan.overlap});
        for (auto& w : ws.windows) {
            if (plan.normalize_on) w = normalize(w);
            if (plan.detrend_on) w = detrend(w);
            if (plan.envelope_on) w = analytic_envelope(w);
            if (plan.taper_on) w = window_taper(w);

            Vector row(static_cast<Index>(out.columns.size()));
            const Spectrum s = plan.spectral == SpectrumKind::FFT ? fft_magnitude(w)
                                                                  : welch_psd(w);
            row.head(kFeatureCount) = extract_features(s);
            if (plan.time_features_on) row.tail(kFeatureCount) = extract_features(w);

            rows.push_back(std::move(row));
            out.labels.push_back(rec.motor.label == Label::Faulty ? 1 : 0);
            out.serials.push_back(rec.motor.serial);
            out.conditions.push_back(rec.condition);
            out.record_ids.push_back(static_cast<int>(ri));
        }
    }
    out.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(out.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) out.values.row(static_cast<Index>(r)) = rows[r];
    return out;
}

Matrix FittedPipeline::transform(const Matrix& features) const {
    return reducer.transform(scaler.transform(cleaner.transform(features)));
}

FittedPipeline fit_pipeline_rows(const PipelinePlan& plan, const FeatureMatrix& features,
                                 const std::vector<Index>& train_rows, std::uint64_t seed) {
    FittedPipeline fp;
    fp.plan = plan;
    fp.feature_columns = features.columns;

    FeatureMatrix train = features.subset(train_rows);
    fp.trained_on = train.fingerprint();

    fp.cleaner = plan.clean_low_variance ? drop_low_variance(train)
                                         : FittedReducer{};
    FeatureMatrix cleaned = train;
    cleaned.values = fp.cleaner.transform(train.values);
    cleaned.columns = fp.cleaner.transformed_columns(train.columns);

    fp.scaler = fit_scaler(cleaned, plan.scaling);
    FeatureMatrix scaled = cleaned;
    scaled.values = fp.scaler.transform(cleaned.values);

    if (plan.reducer == ReducerMethod::None) {
        fp.reducer = FittedReducer{};
    } else {
        const int k = std::min<int>(plan.reducer_k, static_cast<int>(scaled.cols()));
        fp.reducer = fit_reducer(scaled, plan.reducer, k, derive_seed(seed, "reducer"));
    }
    Matrix reduced = fp.reducer.transform(scaled.values);

    fp.model = fit_classifier(plan.classifier, reduced, train.labels, derive_seed(seed, "model"));

    const auto preds = fp.model.predict(reduced);
    Index hit = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hit += preds[i] == train.labels[i];
    fp.training_accuracy =
        preds.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(preds.size());
    return fp;
}

FittedPipeline fit_pipeline(const PipelinePlan& plan, const Dataset& train, std::uint64_t seed) {
    FeatureMatrix features = extract_plan_features(plan, train);
    std::vector<Index> all(static_cast<std::size_t>(features.rows()));
    for (Index i = 0; i < features.rows(); ++i) all[static_cast<std::size_t>(i)] = i;
    return fit_pipeline_rows(plan, features, all, seed);
}

double PipelinePredictions::window_accuracy() const {
    if (window_pred.empty()) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < window_pred.size(); ++i) hit += window_pred[i] == window_label[i];
    return static_cast<double>(hit) / static_cast<double>(window_pred.size());
}

double PipelinePredictions::record_accuracy() const {
    if (record_pred.empty()) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < record_pred.size(); ++i) hit += record_pred[i] == record_label[i];
    return static_cast<double>(hit) / static_cast<double>(record_pred.size());
}

PipelinePredictions apply_pipeline_rows(const FittedPipeline& p, const FeatureMatrix& rows) {
    PipelinePredictions out;
    // Features are keyed by column name: a permuted table is reordered to the
    // fitted layout, anything else is a schema mismatch.
    Matrix aligned;
    if (rows.columns == p.feature_columns) {
        aligned = rows.values;
    } else {
        if (rows.columns.size() != p.feature_columns.size())
            throw Error("apply_pipeline: feature schema mismatch");
        aligned.resize(rows.values.rows(), rows.values.cols());
        for (std::size_t c = 0; c < p.feature_columns.size(); ++c) {
            const auto it = std::find(rows.columns.begin(), rows.columns.end(),
                                      p.feature_columns[c]);
            if (it == rows.columns.end())
                throw Error("apply_pipeline: feature schema mismatch (missing column " +
                            p.feature_columns[c] + ")");
            aligned.col(static_cast<Index>(c)) =
                rows.values.col(std::distance(rows.columns.begin(), it));
        }
    }
    const Matrix transformed = p.transform(aligned);
    out.window_pred = p.model.predict(transformed);
    out.window_score = p.model.predict_score(transformed);
    out.window_label = rows.labels;
    out.window_record = rows.record_ids;
    out.window_serial = rows.serials;

    // Majority vote per record; ties decided by the mean score.
    std::vector<int> order;
    std::map<int, std::pair<std::vector<std::size_t>, int>> by_record;
    for (std::size_t i = 0; i < out.window_pred.size(); ++i) {
        auto& e = by_record[rows.record_ids[i]];
        if (e.first.empty()) order.push_back(rows.record_ids[i]);
        e.first.push_back(i);
        e.second = rows.labels[i];
    }
    for (int id : order) {
        const auto& [idx, label] = by_record[id];
        int votes = 0;
        double score = 0.0;
        for (std::size_t i : idx) {
            votes += out.window_pred[i];
            score += out.window_score[i];
        }
        score /= static_cast<double>(idx.size());
        const int n = static_cast<int>(idx.size());
        int pred;
        if (2 * votes > n)
            pred = 1;
        else if (2 * votes < n)
            pred = 0;
        else
            pred = score >= 0.5 ? 1 : 0;
        out.record_ids.push_back(id);
        out.record_pred.push_back(pred);
        out.record_label.push_back(label);
    }
    return out;
}

PipelinePredictions apply_pipeline(const FittedPipeline& p, const Dataset& d) {
    return apply_pipeline_rows(p, extract_plan_features(p.plan, d));
}

namespace {

json scaler_to_json(const FittedScaler& s) {
    json j;
    j["method"] = to_string(s.method);
    j["offset"] = std::vector<double>(s.offset.data(), s.offset.data() + s.offset.size());
    j["scale"] = std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size());
    j["fitted_on"] = s.fitted_on;
    return j;
}

FittedScaler scaler_from_json(const json& j) {
    FittedScaler s;
    s.method = scaling_from_string(j.at("method").get<std::string>());
    auto off = j.at("offset").get<std::vector<double>>();
    auto sc = j.at("scale").get<std::vector<double>>();
    s.offset = Eigen::Map<Vector>(off.data(), static_cast<Index>(off.size()));
    s.scale = Eigen::Map<Vector>(sc.data(), static_cast<Index>(sc.size()));
    s.fitted_on = j.at("fitted_on").get<std::uint64_t>();
    return s;
}

json reducer_to_json(const FittedReducer& r) {
    json j;
    j["method"] = to_string(r.method);
    j["columns"] = r.columns;
    j["all_constant"] = r.all_constant;
    j["fitted_on"] = r.fitted_on;
    json proj = json::array();
    for (Index c = 0; c < r.projection.cols(); ++c) {
        json col = json::array();
        for (Index i = 0; i < r.projection.rows(); ++i) col.push_back(r.projection(i, c));
        proj.push_back(std::move(col));
    }
    j["projection"] = std::move(proj);
    j["center"] = std::vector<double>(r.center.data(), r.center.data() + r.center.size());
    return j;
}

FittedReducer reducer_from_json(const json& j) {
    FittedReducer r;
    r.method = reducer_from_string(j.at("method").get<std::string>());
    r.columns = j.at("columns").get<std::vector<int>>();
    r.all_constant = j.at("all_constant").get<bool>();
    r.fitted_on = j.at("fitted_on").get<std::uint64_t>();
    const auto& proj = j.at("projection");
    if (!proj.empty()) {
        const auto cols = static_cast<Index>(proj.size());
        const auto rows = static_cast<Index>(proj.at(0).size());
        r.projection.resize(rows, cols);
        for (Index c = 0; c < cols; ++c)
            for (Index i = 0; i < rows; ++i)
                r.projection(i, c) =
                    proj.at(static_cast<std::size_t>(c)).at(static_cast<std::size_t>(i)).get<double>();
    }
    auto center = j.at("center").get<std::vector<double>>();
    r.center = Eigen::Map<Vector>(center.data(), static_cast<Index>(center.size()));
    return r;
}

}  // namespace

json FittedPipeline::to_json() const {
    json j;
    j["plan"] = plan.to_json();
    j["feature_columns"] = feature_columns;
    j["cleaner"] = reducer_to_json(cleaner);
    j["scaler"] = scaler_to_json(scaler);
    j["reducer"] = reducer_to_json(reducer);
    j["model"] = model.to_json();
    j["training_accuracy"] = training_accuracy;
    j["trained_on"] = trained_on;
    return j;
}

FittedPipeline FittedPipeline::from_json(const json& j) {
    FittedPipeline p;
    p.plan = PipelinePlan::from_json(j.at("plan"));
    p.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
    p.cleaner = reducer_from_json(j.at("cleaner"));
    p.scaler = scaler_from_json(j.at("scaler"));
    p.reducer = reducer_from_json(j.at("reducer"));
    p.model = FittedModel::from_json(j.at("model"));
    p.training_accuracy = j.at("training_accuracy").get<double>();
    p.trained_on = j.at("trained_on").get<std::uint64_t>();
    return p;
}

}  // namespace mcsa

#include "mcsa/harness.hpp"

#include "mcsa/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mcsa {

using nlohmann::json;

// ---------------------------------------------------------------- artifact

json PipelineArtifact::to_json() const {
    json j;
    j["tool_version"] = tool_version;
    j["space_version"] = space_version;
    j["seed"] = seed;
    j["dataset_fingerprint"] = dataset_fingerprint;
    j["chromosome"] = chromosome;
    j["plan"] = plan.to_json();
    j["fitness"] = fitness.to_json();
    j["fitted"] = fitted.to_json();
    json front_json = json::array();
    for (const auto& s : front)
        front_json.push_back({{"chromosome", s.chromosome}, {"fitness", s.fitness.to_json()}});
    j["front"] = std::move(front_json);
    json hist = json::array();
    for (const auto& g : history)
        hist.push_back({{"generation", g.generation},
                        {"best_err", g.best_err},
                        {"median_err", g.median_err},
                        {"best_cost", g.best_cost}});
    j["history"] = std::move(hist);
    return j;
}

PipelineArtifact PipelineArtifact::from_json(const json& j) {
    PipelineArtifact a;
    a.tool_version = j.at("tool_version").get<std::string>();
    a.space_version = j.at("space_version").get<std::string>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.dataset_fingerprint = j.at("dataset_fingerprint").get<std::uint64_t>();
    a.chromosome = j.at("chromosome").get<Chromosome>();
    a.plan = PipelinePlan::from_json(j.at("plan"));
    a.fitness = FitnessRecord::from_json(j.at("fitness"));
    a.fitted = FittedPipeline::from_json(j.at("fitted"));
    for (const auto& s : j.at("front"))
        a.front.push_back({s.at("chromosome").get<Chromosome>(),
                           FitnessRecord::from_json(s.at("fitness"))});
    for (const auto& g : j.at("history"))
        a.history.push_back({g.at("generation").get<int>(), g.at("best_err").get<double>(),
                             g.at("median_err").get<double>(), g.at("best_cost").get<double>()});
    return a;
}

void PipelineArtifact::save(const std::filesystem::path& path) const {
    json payload = to_json();
    const std::string body = payload.dump();
    json wrapper;
    wrapper["artifact"] = std::move(payload);
    wrapper["checksum"] = fnv1a(body);
    std::ofstream out(path);
    if (!out) throw Error("cannot write artifact: " + path.string());
    out << wrapper.dump(2) << '\n';
    if (!out) throw Error("I/O failure writing " + path.string());
}

PipelineArtifact PipelineArtifact::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open artifact: " + path.string());
    json wrapper;
    try {
        in >> wrapper;
    } catch (const json::exception& e) {
        throw Error("artifact integrity: unparseable JSON (" + std::string(e.what()) + ")");
    }
    if (!wrapper.contains("artifact") || !wrapper.contains("checksum"))
        throw Error("artifact integrity: missing payload or checksum");
    const std::string body = wrapper.at("artifact").dump();
    if (fnv1a(body) != wrapper.at("checksum").get<std::uint64_t>())
        throw Error("artifact integrity: checksum mismatch");
    try {
        return from_json(wrapper.at("artifact"));
    } catch (const json::exception& e) {
        throw Error("artifact integrity: malformed payload (" + std::string(e.what()) + ")");
    }
}

void export_history_csv(const std::vector<GenerationStats>& history,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write history CSV: " + path.string());
    out << "generation,best_err,median_err,best_cost\n";
    out.precision(17);
    for (const auto& g : history)
        out << g.generation << ',' << g.best_err << ',' << g.median_err << ',' << g.best_cost
            << '\n';
}

// ----------------------------------------------------------------- baseline

PipelinePlan baseline_plan() {
    const SearchSpace space = SearchSpace::default_space();
    return decode(space, baseline_chromosome(space));
}

// ------------------------------------------------------------ holdout split

std::pair<Dataset, Dataset> holdout_split(const Dataset& d, double fraction,
                                          std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw Error("holdout_split: fraction must be in (0,1)");
    validate_dataset(d);

    std::map<std::string, Label> by_serial;
    for (const auto& r : d.records) by_serial[r.motor.serial] = r.motor.label;

    std::vector<std::string> healthy, faulty;
    for (const auto& [serial, label] : by_serial)
        (label == Label::Healthy ? healthy : faulty).push_back(serial);

    Rng rng(derive_seed(seed, "holdout"));
    rng.shuffle(healthy);
    rng.shuffle(faulty);

    std::set<std::string> hold;
    for (auto* cls : {&healthy, &faulty}) {
        if (cls->empty()) continue;
        auto take = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(cls->size())));
        take = std::clamp<std::size_t>(take, 1, cls->size() - 1);
        for (std::size_t i = 0; i < take; ++i) hold.insert((*cls)[i]);
    }

    std::set<std::string> train_serials;
    for (const auto& [serial, label] : by_serial)
        if (!hold.count(serial)) train_serials.insert(serial);

    Dataset train = d.subset_by_serial(train_serials);
    Dataset holdout = d.subset_by_serial(hold);
    train.name = d.name + "_train";
    holdout.name = d.name + "_holdout";
    return {std::move(train), std::move(holdout)};
}

// -------------------------------------------------------- transfer protocol

TransferReport evaluate_transfer(const PipelinePlan& plan, const Dataset& source,
                                 const Dataset& target, std::uint64_t seed,
                                 double holdout_fraction) {
    validate_dataset(source);
    validate_dataset(target);

    auto [train, holdout] = holdout_split(source, holdout_fraction, seed);

    const auto n_train_serials = static_cast<int>(train.serials().size());
    const int k = std::min(5, n_train_serials);
    const auto folds = make_grouped_folds(train, k, 3, derive_seed(seed, "transfer_cv"));
    const FitnessRecord cv =
        evaluate_plan(plan, train, folds, derive_seed(seed, "cv_eval"), CostMode::Surrogate);

    FittedPipeline fitted = fit_pipeline(plan, train, derive_seed(seed, "fit"));
    const auto holdout_preds = apply_pipeline(fitted, holdout);

    // Target-condition records of the holdout serials, same fitted pipeline,
    // no refit and no re-scaling.
    std::set<std::string> holdout_serials;
    for (const auto& s : holdout.serials()) holdout_serials.insert(s);
    Dataset target_slice = target.subset_by_serial(holdout_serials);
    if (target_slice.records.empty())
        throw Error("evaluate_transfer: target dataset has no records for the holdout serials");
    const auto target_preds = apply_pipeline(fitted, target_slice);

    TransferReport r;
    r.source_condition = source.records.front().condition;
    r.target_condition = target.records.front().condition;
    r.source_cv_accuracy = 1.0 - cv.cv_error;
    r.source_cv_std = cv.cv_std;
    r.source_holdout_accuracy = holdout_preds.window_accuracy();
    r.target_accuracy = target_preds.window_accuracy();
    r.accuracy_impact = r.target_accuracy - r.source_holdout_accuracy;
    r.source_holdout_record_accuracy = holdout_preds.record_accuracy();
    r.target_record_accuracy = target_preds.record_accuracy();
    r.plan_summary = plan.describe();
    return r;
}

// --------------------------------------------------------- reducer study

namespace {

// Per-fold accuracy of the fixed-preprocessing plan with the first k entries
// of a selection order (or the top-k principal components).
struct ReducerPathScores {
    // scores[k - k_min] = mean CV accuracy with k features
    std::vector<double> scores;
};

ReducerPathScores score_reducer_path(const PipelinePlan& base, ReducerMethod method,
                                     const FeatureMatrix& features,
                                     const std::vector<GroupedSplit>& folds, int k_min,
                                     int k_max, std::uint64_t seed) {
    const int n_ks = k_max - k_min + 1;
    std::vector<double> acc_sum(static_cast<std::size_t>(n_ks), 0.0);
    int fold_count = 0;

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
            ++fold_count;

            FeatureMatrix train = features.subset(train_rows);
            FeatureMatrix test = features.subset(test_rows);
            const FittedScaler scaler = fit_scaler(train, base.scaling);
            FeatureMatrix train_scaled = train;
            train_scaled.values = scaler.transform(train.values);
            const Matrix test_scaled = scaler.transform(test.values);

            const std::uint64_t fold_seed = derive_seed(
                seed, "reducer_fold",
                rep * static_cast<std::size_t>(split.k) + static_cast<std::size_t>(f));

            // One selection order (or eigenbasis) per fold, shared by all k.
            std::vector<int> path;
            FittedReducer pca;
            if (method == ReducerMethod::PCA)
                pca = fit_reducer(train_scaled, ReducerMethod::PCA,
                                  std::min<int>(k_max, static_cast<int>(train_scaled.cols())),
                                  fold_seed);
            else
                path = selection_path(train_scaled, method, k_max, fold_seed);

            for (int k = k_min; k <= k_max; ++k) {
                Matrix train_red, test_red;
                if (method == ReducerMethod::PCA) {
                    const auto kk = std::min<Index>(k, pca.projection.cols());
                    FittedReducer sliced = pca;
                    sliced.projection = pca.projection.leftCols(kk);
                    train_red = sliced.transform(train_scaled.values);
                    test_red = sliced.transform(test_scaled);
                } else {
                    const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                          path.size());
                    FittedReducer sliced;
                    sliced.method = method;
                    sliced.columns.assign(path.begin(), path.begin() + static_cast<long>(kk));
                    train_red = sliced.transform(train_scaled.values);
                    test_red = sliced.transform(test_scaled);
                }
                const FittedModel model = fit_classifier(base.classifier, train_red,
                                                         train.labels, fold_seed);
                const auto preds = model.predict(test_red);
                std::size_t hit = 0;
                for (std::size_t i = 0; i < preds.size(); ++i)
                    hit += preds[i] == test.labels[i];
                acc_sum[static_cast<std::size_t>(k - k_min)] +=
                    static_cast<double>(hit) / static_cast<double>(preds.size());
            }
        }
    }
    ReducerPathScores out;
    for (double s : acc_sum)
        out.scores.push_back(fold_count > 0 ? s / static_cast<double>(fold_count) : 0.0);
    return out;
}

}  // namespace

ComparisonReport compare_reducers(const Dataset& source, const Dataset& target,
                                  std::uint64_t seed, int k_min, int k_max) {
    PipelinePlan base = SearchSpace::classifier_space(Algorithm::GradientBoosting).prototype;

    auto [train, holdout] = holdout_split(source, 0.2, seed);
    const auto n_train_serials = static_cast<int>(train.serials().size());
    const auto folds = make_grouped_folds(train, std::min(5, n_train_serials), 3,
                                          derive_seed(seed, "reducer_cv"));
    const FeatureMatrix features = extract_plan_features(base, train);
    k_max = std::min<int>(k_max, static_cast<int>(features.cols()));

    ComparisonReport report;
    for (ReducerMethod method : {ReducerMethod::PCA, ReducerMethod::SFS, ReducerMethod::UFS,
                                 ReducerMethod::MRMR}) {
        const auto scores =
            score_reducer_path(base, method, features, folds, k_min, k_max, seed);
        int best_k = k_min;
        double best_acc = -1.0;
        for (int k = k_min; k <= k_max; ++k) {
            const double a = scores.scores[static_cast<std::size_t>(k - k_min)];
            if (a > best_acc + 1e-12) {
                best_acc = a;
                best_k = k;
            }
        }

        PipelinePlan winner = base;
        winner.reducer = method;
        winner.reducer_k = best_k;
        const TransferReport tr = evaluate_transfer(winner, source, target, seed);

        ComparisonRow row;
        row.method = to_string(method);
        row.k = best_k;
        row.cv_accuracy = best_acc;
        row.holdout_accuracy = tr.source_holdout_accuracy;
        row.target_accuracy = tr.target_accuracy;
        row.transfer_delta = tr.accuracy_impact;
        report.rows.push_back(row);
    }

    double lo = report.rows.front().cv_accuracy, hi = lo;
    for (const auto& r : report.rows) {
        lo = std::min(lo, r.cv_accuracy);
        hi = std::max(hi, r.cv_accuracy);
    }
    report.max_difference = hi - lo;
    return report;
}

// -------------------------------------------------------- classifier study

ComparisonReport compare_classifiers(const Dataset& source, std::uint64_t seed,
                                     const EvolveConfig& budget) {
    auto [train, holdout] = holdout_split(source, 0.2, seed);

    ComparisonReport report;
    for (Algorithm a : {Algorithm::GradientBoosting, Algorithm::RandomForest,
                        Algorithm::ExtraTrees, Algorithm::LogisticRegression,
                        Algorithm::KNearest}) {
        const SearchSpace space = SearchSpace::classifier_space(a);
        EvolveConfig cfg = budget;
        cfg.seed = derive_seed(seed, "clf_" + to_string(a));
        cfg.cv_folds = std::min(cfg.cv_folds, static_cast<int>(train.serials().size()));
        const EvolveResult res = evolve(space, train, cfg);
        const auto& best = res.front[select_solution(res.front)];
        const PipelinePlan plan = decode(space, best.chromosome);

        const FittedPipeline fitted =
            fit_pipeline(plan, train, derive_seed(cfg.seed, "final_fit"));
        const auto preds = apply_pipeline(fitted, holdout);

        ComparisonRow row;
        row.method = to_string(a);
        row.cv_accuracy = 1.0 - best.fitness.cv_error;
        row.holdout_accuracy = preds.window_accuracy();
        report.rows.push_back(row);
    }

    double lo = report.rows.front().holdout_accuracy, hi = lo;
    for (const auto& r : report.rows) {
        lo = std::min(lo, r.holdout_accuracy);
        hi = std::max(hi, r.holdout_accuracy);
    }
    report.max_difference = hi - lo;
    return report;
}

// ----------------------------------------------------------------- reports

json TransferReport::to_json() const {
    json j;
    j["source_condition"] = {{"speed_rpm", source_condition.speed_rpm},
                             {"radial_force_n", source_condition.radial_force_n}};
    j["target_condition"] = {{"speed_rpm", target_condition.speed_rpm},
                             {"radial_force_n", target_condition.radial_force_n}};
    j["source_cv_accuracy"] = source_cv_accuracy;
    j["source_cv_std"] = source_cv_std;
    j["source_holdout_accuracy"] = source_holdout_accuracy;
    j["target_accuracy"] = target_accuracy;
    j["accuracy_impact"] = accuracy_impact;
    j["source_holdout_record_accuracy"] = source_holdout_record_accuracy;
    j["target_record_accuracy"] = target_record_accuracy;
    j["plan"] = plan_summary;
    return j;
}

json ComparisonReport::to_json() const {
    json rows_json = json::array();
    for (const auto& r : rows)
        rows_json.push_back({{"method", r.method},
                             {"k", r.k},
                             {"cv_accuracy", r.cv_accuracy},
                             {"holdout_accuracy", r.holdout_accuracy},
                             {"target_accuracy", r.target_accuracy},
                             {"transfer_delta", r.transfer_delta}});
    json j;
    j["rows"] = std::move(rows_json);
    j["max_difference"] = max_difference;
    return j;
}

std::string render_transfer_table(const std::vector<TransferReport>& reports) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "    Source WC            Target WC            Accuracy [%]          Impact [%]\n";
    os << "    rpm      N           rpm      N           CV     Holdout Target\n";
    int i = 1;
    for (const auto& r : reports) {
        os << std::setw(2) << i++ << "  " << std::setw(7) << r.source_condition.speed_rpm << "  "
           << std::setw(7) << r.source_condition.radial_force_n << "     " << std::setw(7)
           << r.target_condition.speed_rpm << "  " << std::setw(7)
           << r.target_condition.radial_force_n << "     " << std::setw(6)
           << 100.0 * r.source_cv_accuracy << " " << std::setw(7)
           << 100.0 * r.source_holdout_accuracy << " " << std::setw(6)
           << 100.0 * r.target_accuracy << "  " << std::showpos << std::setw(7)
           << 100.0 * r.accuracy_impact << std::noshowpos << "\n";
    }
    return os.str();
}

std::string render_comparison_table(const ComparisonReport& report, const std::string& title) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << title << "\n";
    os << "method                 k   CV [%]  Holdout [%]  Target [%]  Delta [%]\n";
    for (const auto& r : report.rows) {
        os << std::left << std::setw(21) << r.method << std::right << std::setw(3) << r.k << " "
           << std::setw(8) << 100.0 * r.cv_accuracy << " " << std::setw(12)
           << 100.0 * r.holdout_accuracy << " " << std::setw(11) << 100.0 * r.target_accuracy
           << "  " << std::showpos << std::setw(9) << 100.0 * r.transfer_delta << std::noshowpos
           << "\n";
    }
    os << "max difference: " << 100.0 * report.max_difference << "\n";
    return os.str();
}

}  // namespace mcsa

// Command-line front end: dataset generation, pipeline optimization,
// transfer evaluation, pipeline application and report rendering.

#include "mcsa/harness.hpp"
#include "mcsa/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

/// Configuration/usage problems exit with code 2; data/artifact problems with
/// code 3 (mcsa::Error).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ------------------------------------------------------------------ config

const json& default_config() {
    static const json cfg = {
        {"seed", 1234},
        {"synth",
         {{"n_motors_per_class", 5},
          {"record_len", 16384},
          {"sample_rate_hz", 8192.0},
          {"pole_pairs", 4},
          {"noise_sigma", 0.12},
          {"severity_min", 0.4},
          {"severity_max", 1.0},
          {"sideband_gain", 0.15},
          {"roughness_gain", 0.4},
          {"conditions",
           {{{"speed_rpm", 250.0}, {"radial_force_n", 0.0}},
            {{"speed_rpm", 250.0}, {"radial_force_n", 1000.0}},
            {{"speed_rpm", 2000.0}, {"radial_force_n", 0.0}},
            {{"speed_rpm", 2000.0}, {"radial_force_n", 1000.0}}}}}},
        {"search",
         {{"generations", 20},
          {"pop_size", 10},
          {"crossover_rate", 0.9},
          {"mutation_rate", -1.0},
          {"cost_mode", "surrogate"},
          {"cv_folds", 5},
          {"cv_repeats", 3}}},
        {"eval",
         {{"holdout_fraction", 0.2},
          {"source", {{"speed_rpm", 250.0}, {"radial_force_n", 0.0}}},
          {"settings",
           {{{"source", {{"speed_rpm", 250.0}, {"radial_force_n", 0.0}}},
             {"target", {{"speed_rpm", 2000.0}, {"radial_force_n", 1000.0}}}},
            {{"source", {{"speed_rpm", 250.0}, {"radial_force_n", 1000.0}}},
             {"target", {{"speed_rpm", 2000.0}, {"radial_force_n", 0.0}}}},
            {{"source", {{"speed_rpm", 2000.0}, {"radial_force_n", 0.0}}},
             {"target", {{"speed_rpm", 250.0}, {"radial_force_n", 1000.0}}}},
            {{"source", {{"speed_rpm", 2000.0}, {"radial_force_n", 1000.0}}},
             {"target", {{"speed_rpm", 250.0}, {"radial_force_n", 0.0}}}}}}}},
        {"io", {{"data_dir", "data"}, {"out_dir", "out"}}},
    };
    return cfg;
}

void check_known_keys(const json& value, const json& reference, const std::string& prefix) {
    if (!value.is_object() || !reference.is_object()) return;
    for (const auto& [key, sub] : value.items()) {
        if (!reference.contains(key))
            throw ConfigError("unknown config key '" + prefix + key + "'");
        // "conditions"/"settings" are arrays of free-form objects
        if (reference.at(key).is_object())
            check_known_keys(sub, reference.at(key), prefix + key + ".");
    }
}

json load_config(const std::string& path, const std::vector<std::string>& overrides,
                 std::uint64_t* seed_flag, const std::string& out_flag) {
    json cfg = default_config();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        json user;
        try {
            in >> user;
        } catch (const json::exception& e) {
            throw ConfigError("config parse error: " + std::string(e.what()));
        }
        check_known_keys(user, cfg, "");
        cfg.merge_patch(user);
    }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::exception&) {
            value = raw;  // bare strings allowed
        }
        json* node = &cfg;
        std::size_t pos = 0;
        std::string remaining = key;
        while ((pos = remaining.find('.')) != std::string::npos) {
            const std::string head = remaining.substr(0, pos);
            if (!node->contains(head)) throw ConfigError("unknown config key '" + key + "'");
            node = &(*node)[head];
            remaining = remaining.substr(pos + 1);
        }
        if (!node->contains(remaining)) throw ConfigError("unknown config key '" + key + "'");
        (*node)[remaining] = value;
    }
    if (seed_flag != nullptr) cfg["seed"] = *seed_flag;
    if (!out_flag.empty()) cfg["io"]["out_dir"] = out_flag;
    return cfg;
}

mcsa::WorkingCondition condition_from(const json& j) {
    return {j.at("speed_rpm").get<double>(), j.at("radial_force_n").get<double>()};
}

mcsa::SynthConfig synth_config_from(const json& cfg) {
    const json& s = cfg.at("synth");
    mcsa::SynthConfig sc;
    sc.n_motors_per_class = s.at("n_motors_per_class").get<int>();
    sc.record_len = s.at("record_len").get<int>();
    sc.sample_rate_hz = s.at("sample_rate_hz").get<double>();
    sc.pole_pairs = s.at("pole_pairs").get<int>();
    sc.noise_sigma = s.at("noise_sigma").get<double>();
    sc.severity_min = s.at("severity_min").get<double>();
    sc.severity_max = s.at("severity_max").get<double>();
    sc.fault.sideband_gain = s.at("sideband_gain").get<double>();
    sc.fault.roughness_gain = s.at("roughness_gain").get<double>();
    sc.conditions.clear();
    for (const auto& c : s.at("conditions")) sc.conditions.push_back(condition_from(c));
    sc.seed = cfg.at("seed").get<std::uint64_t>();
    return sc;
}

mcsa::EvolveConfig evolve_config_from(const json& cfg, int jobs) {
    const json& s = cfg.at("search");
    mcsa::EvolveConfig ec;
    ec.generations = s.at("generations").get<int>();
    ec.pop_size = s.at("pop_size").get<int>();
    ec.crossover_rate = s.at("crossover_rate").get<double>();
    ec.mutation_rate = s.at("mutation_rate").get<double>();
    const std::string mode = s.at("cost_mode").get<std::string>();
    if (mode == "surrogate")
        ec.cost_mode = mcsa::CostMode::Surrogate;
    else if (mode == "wall")
        ec.cost_mode = mcsa::CostMode::Wall;
    else
        throw ConfigError("search.cost_mode must be 'surrogate' or 'wall'");
    ec.cv_folds = s.at("cv_folds").get<int>();
    ec.cv_repeats = s.at("cv_repeats").get<int>();
    ec.seed = cfg.at("seed").get<std::uint64_t>();
    ec.jobs = jobs;
    return ec;
}

fs::path dataset_path(const json& cfg, const mcsa::WorkingCondition& wc) {
    return fs::path(cfg.at("io").at("data_dir").get<std::string>()) /
           ("wc_" + wc.describe() + ".ndjson");
}

mcsa::Dataset load_dataset_checked(const fs::path& path) {
    if (!fs::exists(path))
        throw ConfigError("dataset file not found: " + path.string() +
                          " (run 'mcsa generate' first?)");
    return mcsa::load_dataset(path);
}

// ---------------------------------------------------------------- commands

int cmd_generate(const json& cfg) {
    const auto sc = synth_config_from(cfg);
    const auto datasets = mcsa::generate_dataset(sc);
    const fs::path data_dir(cfg.at("io").at("data_dir").get<std::string>());
    fs::create_directories(data_dir);

    json manifest;
    manifest["seed"] = cfg.at("seed");
    json files = json::array();
    for (const auto& [wc, d] : datasets) {
        const fs::path p = dataset_path(cfg, wc);
        mcsa::save_dataset(d, p);
        files.push_back({{"path", p.string()},
                         {"condition", {{"speed_rpm", wc.speed_rpm},
                                        {"radial_force_n", wc.radial_force_n}}},
                         {"records", d.records.size()},
                         {"fingerprint", mcsa::dataset_fingerprint(d)}});
        std::cout << "wrote " << p.string() << " (" << d.records.size() << " records)\n";
    }
    manifest["files"] = std::move(files);
    std::ofstream out(data_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    return 0;
}

int cmd_optimize(const json& cfg, int jobs) {
    const auto source_wc = condition_from(cfg.at("eval").at("source"));
    const auto source = load_dataset_checked(dataset_path(cfg, source_wc));

    const auto space = mcsa::SearchSpace::default_space();
    const auto ec = evolve_config_from(cfg, jobs);
    const auto result = mcsa::evolve(space, source, ec);
    const auto& best = result.front[mcsa::select_solution(result.front)];

    mcsa::PipelineArtifact artifact;
    artifact.space_version = space.version;
    artifact.seed = ec.seed;
    artifact.dataset_fingerprint = mcsa::dataset_fingerprint(source);
    artifact.chromosome = best.chromosome;
    artifact.plan = mcsa::decode(space, best.chromosome);
    artifact.fitness = best.fitness;
    artifact.fitted = mcsa::fit_pipeline(artifact.plan, source,
                                         mcsa::derive_seed(ec.seed, "artifact_fit"));
    artifact.front = result.front;
    artifact.history = result.history;

    const fs::path out_dir(cfg.at("io").at("out_dir").get<std::string>());
    fs::create_directories(out_dir);
    artifact.save(out_dir / "artifact.json");
    mcsa::export_history_csv(result.history, out_dir / "history.csv");

    std::cout << "selected: " << artifact.plan.describe() << "\n"
              << "cv_error=" << artifact.fitness.cv_error << " cost=" << artifact.fitness.cost
              << "\nwrote " << (out_dir / "artifact.json").string() << "\n";
    return 0;
}

int cmd_evaluate(const json& cfg, const std::string& artifact_path, bool with_reducers,
                 bool with_classifiers, int jobs) {
    const auto artifact = mcsa::PipelineArtifact::load(artifact_path);
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    const double holdout = cfg.at("eval").at("holdout_fraction").get<double>();

    std::vector<mcsa::TransferReport> reports;
    for (const auto& setting : cfg.at("eval").at("settings")) {
        const auto src_wc = condition_from(setting.at("source"));
        const auto tgt_wc = condition_from(setting.at("target"));
        const auto source = load_dataset_checked(dataset_path(cfg, src_wc));
        const auto target = load_dataset_checked(dataset_path(cfg, tgt_wc));
        reports.push_back(
            mcsa::evaluate_transfer(artifact.plan, source, target, seed, holdout));
    }

    const fs::path out_dir(cfg.at("io").at("out_dir").get<std::string>());
    fs::create_directories(out_dir);
    json j;
    j["seed"] = seed;
    j["plan"] = artifact.plan.to_json();
    json rows = json::array();
    for (const auto& r : reports) rows.push_back(r.to_json());
    j["transfer_reports"] = std::move(rows);

    const std::string table = mcsa::render_transfer_table(reports);
    std::cout << table;

    if (with_reducers) {
        const auto& first = cfg.at("eval").at("settings").at(0);
        const auto source = load_dataset_checked(dataset_path(cfg, condition_from(first.at("source"))));
        const auto target = load_dataset_checked(dataset_path(cfg, condition_from(first.at("target"))));
        const auto rep = mcsa::compare_reducers(source, target, seed);
        j["reducer_comparison"] = rep.to_json();
        std::cout << mcsa::render_comparison_table(rep, "feature reducers");
    }
    if (with_classifiers) {
        const auto& first = cfg.at("eval").at("settings").at(0);
        const auto source = load_dataset_checked(dataset_path(cfg, condition_from(first.at("source"))));
        auto budget = evolve_config_from(cfg, jobs);
        const auto rep = mcsa::compare_classifiers(source, seed, budget);
        j["classifier_comparison"] = rep.to_json();
        std::cout << mcsa::render_comparison_table(rep, "classifiers");
    }

    std::ofstream out(out_dir / "evaluation.json");
    out << j.dump(2) << '\n';
    std::ofstream txt(out_dir / "evaluation.txt");
    txt << table;
    std::cout << "wrote " << (out_dir / "evaluation.json").string() << "\n";
    return 0;
}

int cmd_apply(const json& cfg, const std::string& artifact_path, const std::string& data_path) {
    const auto artifact = mcsa::PipelineArtifact::load(artifact_path);
    const fs::path out_dir(cfg.at("io").at("out_dir").get<std::string>());
    fs::create_directories(out_dir);

    const fs::path win_csv = out_dir / "predictions_windows.csv";
    const fs::path rec_csv = out_dir / "predictions_records.csv";

    if (!fs::exists(data_path)) throw ConfigError("dataset file not found: " + data_path);

    // An empty dataset file yields header-only CSVs.
    bool empty = true;
    {
        std::ifstream probe(data_path);
        std::string line;
        while (std::getline(probe, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                empty = false;
                break;
            }
    }
    std::ofstream wout(win_csv), rout(rec_csv);
    wout << "record,serial,window,label,pred,score\n";
    rout << "record,serial,label,pred\n";
    if (empty) {
        std::cout << "wrote " << win_csv.string() << " (empty dataset)\n";
        return 0;
    }

    const auto data = mcsa::load_dataset(data_path);
    const auto preds = mcsa::apply_pipeline(artifact.fitted, data);

    wout.precision(17);
    std::map<int, int> window_counter;
    for (std::size_t i = 0; i < preds.window_pred.size(); ++i) {
        const int rec = preds.window_record[i];
        wout << rec << ',' << preds.window_serial[i] << ',' << window_counter[rec]++ << ','
             << preds.window_label[i] << ',' << preds.window_pred[i] << ','
             << preds.window_score[static_cast<mcsa::Index>(i)] << '\n';
    }
    for (std::size_t i = 0; i < preds.record_pred.size(); ++i) {
        const int rec = preds.record_ids[i];
        rout << rec << ',' << data.records[static_cast<std::size_t>(rec)].motor.serial << ','
             << preds.record_label[i] << ',' << preds.record_pred[i] << '\n';
    }
    std::cout << "window accuracy: " << preds.window_accuracy()
              << "  record accuracy: " << preds.record_accuracy() << "\n"
              << "wrote " << win_csv.string() << "\n";
    return 0;
}

int cmd_report(const std::string& in_path) {
    std::ifstream in(in_path);
    if (!in) throw ConfigError("cannot open report file: " + in_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw mcsa::Error("unparseable report JSON: " + std::string(e.what()));
    }

    if (j.contains("transfer_reports")) {
        std::vector<mcsa::TransferReport> reports;
        for (const auto& r : j.at("transfer_reports")) {
            mcsa::TransferReport t;
            t.source_condition = condition_from(r.at("source_condition"));
            t.target_condition = condition_from(r.at("target_condition"));
            t.source_cv_accuracy = r.at("source_cv_accuracy").get<double>();
            t.source_holdout_accuracy = r.at("source_holdout_accuracy").get<double>();
            t.target_accuracy = r.at("target_accuracy").get<double>();
            t.accuracy_impact = r.at("accuracy_impact").get<double>();
            reports.push_back(t);
        }
        std::cout << mcsa::render_transfer_table(reports);
    }
    for (const char* key : {"reducer_comparison", "classifier_comparison"}) {
        if (!j.contains(key)) continue;
        mcsa::ComparisonReport rep;
        for (const auto& r : j.at(key).at("rows")) {
            mcsa::ComparisonRow row;
            row.method = r.at("method").get<std::string>();
            row.k = r.at("k").get<int>();
            row.cv_accuracy = r.at("cv_accuracy").get<double>();
            row.holdout_accuracy = r.at("holdout_accuracy").get<double>();
            row.target_accuracy = r.at("target_accuracy").get<double>();
            row.transfer_delta = r.at("transfer_delta").get<double>();
            rep.rows.push_back(row);
        }
        rep.max_difference = j.at(key).at("max_difference").get<double>();
        std::cout << mcsa::render_comparison_table(rep, key);
    }
    if (j.contains("artifact")) {
        const auto artifact = mcsa::PipelineArtifact::load(in_path);
        std::cout << "plan: " << artifact.plan.describe() << "\n"
                  << "cv_error=" << artifact.fitness.cv_error
                  << " cost=" << artifact.fitness.cost
                  << " training_accuracy=" << artifact.fitted.training_accuracy << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pipeline search for sensorless bearing fault detection"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir, artifact_path, data_path, report_path;
    std::vector<std::string> overrides;
    std::uint64_t seed_flag = 0;
    bool seed_given = false;
    int jobs = 1;
    bool with_reducers = false, with_classifiers = false;

    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--seed", seed_flag, "override the root seed")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--jobs", jobs, "parallel evaluation threads");
    app.add_option("--set", overrides, "override a config key, e.g. search.generations=5");
    app.add_option("--out", out_dir, "output directory");

    auto* generate = app.add_subcommand("generate", "write synthetic datasets per condition");
    auto* optimize = app.add_subcommand("optimize", "run the pipeline search on the source");
    auto* evaluate = app.add_subcommand("evaluate", "transfer evaluation of an artifact");
    evaluate->add_option("--artifact", artifact_path, "pipeline artifact")->required();
    evaluate->add_flag("--reducers", with_reducers, "include the feature-reducer study");
    evaluate->add_flag("--classifiers", with_classifiers, "include the classifier study");
    auto* apply = app.add_subcommand("apply", "apply a fitted artifact to a dataset");
    apply->add_option("--artifact", artifact_path, "pipeline artifact")->required();
    apply->add_option("--data", data_path, "NDJSON dataset")->required();
    auto* report = app.add_subcommand("report", "render text tables from a report JSON");
    report->add_option("--in", report_path, "report or artifact JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        const json cfg =
            load_config(config_path, overrides, seed_given ? &seed_flag : nullptr, out_dir);
        if (generate->parsed()) return cmd_generate(cfg);
        if (optimize->parsed()) return cmd_optimize(cfg, jobs);
        if (evaluate->parsed())
            return cmd_evaluate(cfg, artifact_path, with_reducers, with_classifiers, jobs);
        if (apply->parsed()) return cmd_apply(cfg, artifact_path, data_path);
        if (report->parsed()) return cmd_report(report_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mcsa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

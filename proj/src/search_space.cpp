#include "mcsa/search_space.hpp"

#include <cmath>
#include <sstream>

namespace mcsa {

namespace {

std::string num_label(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

GeneSpec numeric_gene(const std::string& id, char stage, std::initializer_list<double> values) {
    GeneSpec g{id, stage, {}};
    for (double v : values) g.options.push_back({num_label(v), v});
    return g;
}

GeneSpec range_gene(const std::string& id, char stage, int lo, int hi) {
    GeneSpec g{id, stage, {}};
    for (int v = lo; v <= hi; ++v)
        g.options.push_back({num_label(v), static_cast<double>(v)});
    return g;
}

GeneSpec flag_gene(const std::string& id, char stage) {
    return GeneSpec{id, stage, {{"off", 0.0}, {"on", 1.0}}};
}

GeneSpec choice_gene(const std::string& id, char stage,
                     std::initializer_list<const char*> labels) {
    GeneSpec g{id, stage, {}};
    double v = 0.0;
    for (const char* l : labels) g.options.push_back({l, v++});
    return g;
}

}  // namespace

int GeneSpec::find_value(double v) const {
    for (std::size_t i = 0; i < options.size(); ++i)
        if (options[i].value == v) return static_cast<int>(i);
    return -1;
}

int GeneSpec::find_label(const std::string& l) const {
    for (std::size_t i = 0; i < options.size(); ++i)
        if (options[i].label == l) return static_cast<int>(i);
    return -1;
}

std::uint64_t chromosome_key(const Chromosome& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int v : c) h = fnv1a(static_cast<double>(v), h);
    return h;
}

int SearchSpace::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < genes.size(); ++i)
        if (genes[i].id == id) return static_cast<int>(i);
    return -1;
}

void SearchSpace::validate(const Chromosome& c) const {
    if (c.size() != genes.size())
        throw Error("chromosome length " + std::to_string(c.size()) + " != gene count " +
                    std::to_string(genes.size()));
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] < 0 || c[i] >= static_cast<int>(genes[i].options.size()))
            throw Error("gene " + genes[i].id + ": option index " + std::to_string(c[i]) +
                        " out of domain");
}

Chromosome SearchSpace::random_chromosome(Rng& rng) const {
    Chromosome c(genes.size());
    for (std::size_t i = 0; i < genes.size(); ++i)
        c[i] = static_cast<int>(rng.uniform_int(genes[i].options.size()));
    return c;
}

SearchSpace SearchSpace::default_space() {
    SearchSpace s;
    s.version = "pipeline-v1";
    s.genes = {
        numeric_gene("a_10", 'A', {16.6, 133.3}),
        numeric_gene("a_20", 'A', {118.0}),
        choice_gene("a_40", 'A', {"raw", "notch", "rsfr", "park"}),
        numeric_gene("a_50", 'A', {5.0}),
        numeric_gene("a_51", 'A', {2.0, 3.0}),
        flag_gene("a_52", 'A'),
        numeric_gene("b_10", 'B', {1024.0, 2048.0}),
        numeric_gene("b_11", 'B', {0.0}),
        flag_gene("b_20", 'B'),
        flag_gene("b_30", 'B'),
        flag_gene("b_40", 'B'),
        flag_gene("b_50", 'B'),
        choice_gene("c_10", 'C', {"fft", "psd"}),
        flag_gene("c_20", 'C'),
        flag_gene("c_30", 'C'),
        choice_gene("c_40", 'C', {"minmax01", "standardize", "robust"}),
        choice_gene("c_50", 'C', {"none", "pca", "ufs", "mrmr"}),
        range_gene("c_51", 'C', 2, 24),
        numeric_gene("d_10", 'D', {100.0}),
        range_gene("d_11", 'D', 1, 10),
        numeric_gene("d_12", 'D',
                     {std::exp(-3.0), std::exp(-2.0), std::exp(-1.0), 0.5, 1.0}),
        range_gene("d_13", 'D', 1, 20),
    };
    s.prototype = PipelinePlan{};
    return s;
}

SearchSpace SearchSpace::classifier_space(Algorithm a) {
    SearchSpace s;
    s.version = "classifier-" + to_string(a) + "-v1";

    // Fixed preprocessing shared by every compared classifier.
    PipelinePlan p;
    p.stage_a = StageASelect::Raw;
    p.window_len = 1024;
    p.overlap = 0;
    p.spectral = SpectrumKind::FFT;
    p.time_features_on = true;
    p.scaling = ScalingMethod::MinMax01;
    p.reducer = ReducerMethod::None;
    p.classifier = ClassifierSpec::defaults(a);
    s.prototype = p;

    switch (a) {
        case Algorithm::GradientBoosting:
            s.genes = {
                range_gene("d_11", 'D', 1, 10),
                numeric_gene("d_12", 'D',
                             {std::exp(-3.0), std::exp(-2.0), std::exp(-1.0), 0.5, 1.0}),
                range_gene("d_13", 'D', 1, 20),
            };
            break;
        case Algorithm::RandomForest:
        case Algorithm::ExtraTrees:
            s.genes = {
                numeric_gene("n_trees", 'D', {10.0, 25.0, 50.0, 100.0}),
                numeric_gene("max_depth", 'D', {0.0, 2.0, 4.0, 8.0, 16.0}),
                numeric_gene("min_samples_leaf", 'D', {1.0, 2.0, 4.0, 8.0}),
            };
            break;
        case Algorithm::LogisticRegression:
            s.genes = {
                numeric_gene("l2", 'D', {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}),
                numeric_gene("max_iter", 'D', {50.0, 100.0}),
            };
            break;
        case Algorithm::KNearest:
            s.genes = {
                numeric_gene("k", 'D', {1.0, 3.0, 5.0, 7.0, 9.0, 15.0}),
                numeric_gene("manhattan", 'D', {0.0, 1.0}),
            };
            break;
    }
    return s;
}

PipelinePlan decode(const SearchSpace& space, const Chromosome& c, int n_channels) {
    space.validate(c);
    PipelinePlan plan = space.prototype;
    plan.repairs.clear();

    for (std::size_t i = 0; i < space.genes.size(); ++i) {
        const auto& gene = space.genes[i];
        const auto& opt = gene.options[static_cast<std::size_t>(c[i])];
        const std::string& id = gene.id;
        if (id == "a_10") plan.notch_hz = opt.value;
        else if (id == "a_20") plan.pseudo_supply_hz = opt.value;
        else if (id == "a_40") plan.stage_a = stage_a_from_string(opt.label);
        else if (id == "a_50") plan.savgol_window = static_cast<int>(opt.value);
        else if (id == "a_51") plan.savgol_order = static_cast<int>(opt.value);
        else if (id == "a_52") plan.savgol_on = opt.value != 0.0;
        else if (id == "b_10") plan.window_len = static_cast<int>(opt.value);
        else if (id == "b_11") plan.overlap = static_cast<int>(opt.value);
        else if (id == "b_20") plan.normalize_on = opt.value != 0.0;
        else if (id == "b_30") plan.detrend_on = opt.value != 0.0;
        else if (id == "b_40") plan.envelope_on = opt.value != 0.0;
        else if (id == "b_50") plan.taper_on = opt.value != 0.0;
        else if (id == "c_10")
            plan.spectral = opt.label == "fft" ? SpectrumKind::FFT : SpectrumKind::PSD;
        else if (id == "c_20") plan.time_features_on = opt.value != 0.0;
        else if (id == "c_30") plan.clean_low_variance = opt.value != 0.0;
        else if (id == "c_40") plan.scaling = scaling_from_string(opt.label);
        else if (id == "c_50") plan.reducer = reducer_from_string(opt.label);
        else if (id == "c_51") plan.reducer_k = static_cast<int>(opt.value);
        else if (id == "d_10") plan.classifier.params["estimators"] = opt.value;
        else if (id == "d_11") plan.classifier.params["max_leaves"] = opt.value;
        else if (id == "d_12") plan.classifier.params["learning_rate"] = opt.value;
        else if (id == "d_13") plan.classifier.params["min_node_weight"] = opt.value;
        else plan.classifier.params[id] = opt.value;  // reduced classifier spaces
    }

    if (plan.stage_a == StageASelect::Park && n_channels < 3) {
        plan.stage_a = StageASelect::Raw;
        plan.repairs.push_back("park_needs_3_channels: fell back to raw");
    }
    return plan;
}

Chromosome encode(const SearchSpace& space, const PipelinePlan& plan) {
    Chromosome c(space.genes.size());
    for (std::size_t i = 0; i < space.genes.size(); ++i) {
        const auto& gene = space.genes[i];
        const std::string& id = gene.id;
        int idx = -1;
        if (id == "a_10") idx = gene.find_value(plan.notch_hz);
        else if (id == "a_20") idx = gene.find_value(plan.pseudo_supply_hz);
        else if (id == "a_40") idx = gene.find_label(to_string(plan.stage_a));
        else if (id == "a_50") idx = gene.find_value(plan.savgol_window);
        else if (id == "a_51") idx = gene.find_value(plan.savgol_order);
        else if (id == "a_52") idx = gene.find_value(plan.savgol_on ? 1.0 : 0.0);
        else if (id == "b_10") idx = gene.find_value(plan.window_len);
        else if (id == "b_11") idx = gene.find_value(plan.overlap);
        else if (id == "b_20") idx = gene.find_value(plan.normalize_on ? 1.0 : 0.0);
        else if (id == "b_30") idx = gene.find_value(plan.detrend_on ? 1.0 : 0.0);
        else if (id == "b_40") idx = gene.find_value(plan.envelope_on ? 1.0 : 0.0);
        else if (id == "b_50") idx = gene.find_value(plan.taper_on ? 1.0 : 0.0);
        else if (id == "c_10")
            idx = gene.find_label(plan.spectral == SpectrumKind::FFT ? "fft" : "psd");
        else if (id == "c_20") idx = gene.find_value(plan.time_features_on ? 1.0 : 0.0);
        else if (id == "c_30") idx = gene.find_value(plan.clean_low_variance ? 1.0 : 0.0);
        else if (id == "c_40") idx = gene.find_label(to_string(plan.scaling));
        else if (id == "c_50") idx = gene.find_label(to_string(plan.reducer));
        else if (id == "c_51") idx = gene.find_value(plan.reducer_k);
        else if (id == "d_10") idx = gene.find_value(plan.classifier.param("estimators"));
        else if (id == "d_11") idx = gene.find_value(plan.classifier.param("max_leaves"));
        else if (id == "d_12") idx = gene.find_value(plan.classifier.param("learning_rate"));
        else if (id == "d_13") idx = gene.find_value(plan.classifier.param("min_node_weight"));
        else idx = gene.find_value(plan.classifier.param(id));
        if (idx < 0)
            throw Error("encode: plan value for gene " + id + " is not in its domain");
        c[i] = idx;
    }
    return c;
}

Chromosome baseline_chromosome(const SearchSpace& space) {
    PipelinePlan p;  // defaults are the baseline except the flags set below
    p.stage_a = StageASelect::Raw;
    p.window_len = 1024;
    p.overlap = 0;
    p.spectral = SpectrumKind::FFT;
    p.time_features_on = true;
    p.scaling = ScalingMethod::MinMax01;
    p.reducer = ReducerMethod::None;
    p.reducer_k = 2;
    p.classifier = ClassifierSpec::defaults(Algorithm::GradientBoosting);
    return encode(space, p);
}

}  // namespace mcsa

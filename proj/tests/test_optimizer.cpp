#include "mcsa/nsga2.hpp"
#include "mcsa/synth.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mcsa;

namespace {

FitnessRecord fr(double err, double cost) {
    FitnessRecord f;
    f.cv_error = err;
    f.cost = cost;
    return f;
}

// O(n^2) front-assignment oracle: peel off the mutually non-dominated set,
// repeat. Independent of non_dominated_sort.
std::vector<int> front_index_oracle(const std::vector<FitnessRecord>& pts) {
    std::vector<int> front_of(pts.size(), -1);
    std::vector<bool> assigned(pts.size(), false);
    int level = 0;
    std::size_t left = pts.size();
    while (left > 0) {
        std::vector<std::size_t> current;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (assigned[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (assigned[j] || i == j) continue;
                const bool no_worse = pts[j].cv_error <= pts[i].cv_error &&
                                      pts[j].cost <= pts[i].cost;
                const bool strict = pts[j].cv_error < pts[i].cv_error ||
                                    pts[j].cost < pts[i].cost;
                if (no_worse && strict) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) current.push_back(i);
        }
        for (std::size_t i : current) {
            front_of[i] = level;
            assigned[i] = true;
            --left;
        }
        ++level;
    }
    return front_of;
}

Dataset small_source() {
    SynthConfig cfg;
    cfg.n_motors_per_class = 3;
    cfg.record_len = 4096;
    cfg.conditions = {{250.0, 0.0}};
    return generate_dataset(cfg).at({250.0, 0.0});
}

}  // namespace

TEST_CASE("non_dominated_sort matches the spec example") {
    const std::vector<FitnessRecord> pts = {fr(1, 2), fr(2, 1), fr(2, 2), fr(3, 3)};
    const auto fronts = non_dominated_sort(pts);
    REQUIRE(fronts.size() == 3);
    CHECK(std::set<int>(fronts[0].begin(), fronts[0].end()) == std::set<int>{0, 1});
    CHECK(fronts[1] == std::vector<int>{2});
    CHECK(fronts[2] == std::vector<int>{3});
}

TEST_CASE("non_dominated_sort: single point and duplicates") {
    CHECK(non_dominated_sort({fr(1, 1)}).size() == 1);
    const auto fronts = non_dominated_sort({fr(1, 1), fr(1, 1)});
    REQUIRE(fronts.size() == 1);
    CHECK(fronts[0].size() == 2);
}

TEST_CASE("non_dominated_sort agrees with the brute-force oracle on 1000 instances") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = 1 + rng.uniform_int(50);
        std::vector<FitnessRecord> pts;
        for (std::uint64_t i = 0; i < n; ++i) {
            // small integer grid provokes plenty of ties and duplicates
            pts.push_back(fr(static_cast<double>(rng.uniform_int(6)),
                             static_cast<double>(rng.uniform_int(6))));
        }
        const auto fronts = non_dominated_sort(pts);
        const auto oracle = front_index_oracle(pts);
        std::vector<int> got(pts.size(), -1);
        for (std::size_t fi = 0; fi < fronts.size(); ++fi)
            for (int idx : fronts[fi]) got[static_cast<std::size_t>(idx)] = static_cast<int>(fi);
        CHECK(got == oracle);
    }
}

TEST_CASE("crowding distance") {
    SUBCASE("two-member fronts are all boundary") {
        const std::vector<FitnessRecord> pts = {fr(1, 2), fr(2, 1)};
        const auto d = crowding_distance(pts, {0, 1});
        CHECK(std::isinf(d[0]));
        CHECK(std::isinf(d[1]));
    }
    SUBCASE("three colinear evenly spaced points: middle distance is 2") {
        const std::vector<FitnessRecord> pts = {fr(0, 2), fr(1, 1), fr(2, 0)};
        const auto d = crowding_distance(pts, {0, 1, 2});
        CHECK(std::isinf(d[0]));
        CHECK(d[1] == doctest::Approx(2.0));
        CHECK(std::isinf(d[2]));
    }
    SUBCASE("identical objectives give zero interior distance") {
        const std::vector<FitnessRecord> pts = {fr(1, 1), fr(1, 1), fr(1, 1)};
        const auto d = crowding_distance(pts, {0, 1, 2});
        CHECK(d[1] == 0.0);
    }
}

TEST_CASE("decode is total over the full gene product space (fuzz)") {
    const auto space = SearchSpace::default_space();
    Rng rng(555);
    for (int i = 0; i < 10000; ++i) {
        const Chromosome c = space.random_chromosome(rng);
        const PipelinePlan plan = decode(space, c);
        CHECK(plan.window_len >= 1024);
    }
}

TEST_CASE("decode/encode round-trip on random chromosomes") {
    const auto space = SearchSpace::default_space();
    Rng rng(556);
    for (int i = 0; i < 2000; ++i) {
        const Chromosome c = space.random_chromosome(rng);
        const PipelinePlan plan = decode(space, c);
        CHECK(encode(space, plan) == c);
    }
}

TEST_CASE("decode repairs Park on single-channel data") {
    const auto space = SearchSpace::default_space();
    Chromosome c = baseline_chromosome(space);
    c[static_cast<std::size_t>(space.index_of("a_40"))] =
        space.genes[static_cast<std::size_t>(space.index_of("a_40"))].find_label("park");
    const PipelinePlan repaired = decode(space, c, 1);
    CHECK(repaired.stage_a == StageASelect::Raw);
    REQUIRE(repaired.repairs.size() == 1);
    const PipelinePlan intact = decode(space, c, 3);
    CHECK(intact.stage_a == StageASelect::Park);
    CHECK(intact.repairs.empty());
}

TEST_CASE("baseline chromosome decodes to the documented minimal-risk plan") {
    const auto space = SearchSpace::default_space();
    const PipelinePlan plan = decode(space, baseline_chromosome(space));
    CHECK(plan.stage_a == StageASelect::Raw);
    CHECK(plan.window_len == 1024);
    CHECK(plan.overlap == 0);
    CHECK(plan.spectral == SpectrumKind::FFT);
    CHECK(plan.time_features_on);
    CHECK(plan.scaling == ScalingMethod::MinMax01);
    CHECK(plan.reducer == ReducerMethod::None);
    CHECK_FALSE(plan.savgol_on);
    CHECK_FALSE(plan.normalize_on);
    CHECK(plan.classifier.algorithm == Algorithm::GradientBoosting);
    CHECK(plan.classifier.param("estimators") == 100.0);
    CHECK(plan.repairs.empty());
}

TEST_CASE("evaluate_plan") {
    const Dataset source = small_source();
    const auto folds = make_grouped_folds(source, 3, 1, 9);
    const auto space = SearchSpace::default_space();
    PipelinePlan plan = decode(space, baseline_chromosome(space));
    plan.window_len = 1024;

    SUBCASE("planted synthetic signal reaches low cv_error") {
        const auto fit = evaluate_plan(plan, source, folds, 1, CostMode::Surrogate);
        CHECK_FALSE(fit.failed);
        CHECK(fit.cv_error <= 0.2);
    }
    SUBCASE("random labels give chance-level error") {
        // Bigger dataset for a tighter null: break the label-signal link by
        // shuffling labels across serials (balanced permutation, so grouping
        // stays intact and both classes keep 5 serials).
        SynthConfig cfg;
        cfg.n_motors_per_class = 5;
        cfg.record_len = 8192;
        cfg.conditions = {{250.0, 0.0}};
        Dataset shuffled = generate_dataset(cfg).at({250.0, 0.0});
        auto serials = shuffled.serials();
        Rng rng(77);
        rng.shuffle(serials);
        std::map<std::string, Label> relabel;
        for (std::size_t i = 0; i < serials.size(); ++i)
            relabel[serials[i]] = i % 2 == 0 ? Label::Healthy : Label::Faulty;
        for (auto& r : shuffled.records) r.motor.label = relabel[r.motor.serial];

        const auto folds2 = make_grouped_folds(shuffled, 5, 3, 10);
        const auto fit = evaluate_plan(plan, shuffled, folds2, 1, CostMode::Surrogate);
        CHECK(fit.cv_error >= 0.3);
        CHECK(fit.cv_error <= 0.7);
    }
    SUBCASE("window longer than the record fails softly with worst fitness") {
        PipelinePlan bad = plan;
        bad.window_len = 1 << 20;
        const auto fit = evaluate_plan(bad, source, folds, 1, CostMode::Surrogate);
        CHECK(fit.failed);
        CHECK(fit.cv_error == 1.0);
    }
    SUBCASE("surrogate cost is deterministic and stage-sensitive") {
        PipelinePlan heavy = plan;
        heavy.envelope_on = true;
        heavy.spectral = SpectrumKind::PSD;
        const auto a = evaluate_plan(plan, source, folds, 1, CostMode::Surrogate);
        const auto b = evaluate_plan(plan, source, folds, 2, CostMode::Surrogate);
        const auto c = evaluate_plan(heavy, source, folds, 1, CostMode::Surrogate);
        CHECK(a.cost == b.cost);
        CHECK(c.cost > a.cost);
    }
}

TEST_CASE("evolve") {
    const Dataset source = small_source();
    const auto space = SearchSpace::default_space();
    EvolveConfig cfg;
    cfg.generations = 3;
    cfg.pop_size = 6;
    cfg.seed = 31;
    cfg.cv_folds = 3;
    cfg.cv_repeats = 1;

    SUBCASE("zero generations returns the initial population's front") {
        EvolveConfig zero = cfg;
        zero.generations = 0;
        const auto res = evolve(space, source, zero);
        CHECK(res.history.size() == 1);
        CHECK_FALSE(res.front.empty());
        // front members are mutually non-dominated
        for (const auto& a : res.front)
            for (const auto& b : res.front)
                if (&a != &b) CHECK_FALSE(dominates(a.fitness, b.fitness));
    }
    SUBCASE("elitism: best cv_error is non-increasing over generations") {
        const auto res = evolve(space, source, cfg);
        REQUIRE(res.history.size() == 4);
        for (std::size_t g = 1; g < res.history.size(); ++g)
            CHECK(res.history[g].best_err <= res.history[g - 1].best_err + 1e-12);
    }
    SUBCASE("same seed, same history; jobs do not change the outcome") {
        const auto a = evolve(space, source, cfg);
        const auto b = evolve(space, source, cfg);
        EvolveConfig parallel = cfg;
        parallel.jobs = 4;
        const auto c = evolve(space, source, parallel);
        REQUIRE(a.front.size() == b.front.size());
        REQUIRE(a.front.size() == c.front.size());
        for (std::size_t i = 0; i < a.front.size(); ++i) {
            CHECK(a.front[i].chromosome == b.front[i].chromosome);
            CHECK(a.front[i].chromosome == c.front[i].chromosome);
            CHECK(a.front[i].fitness.cv_error == c.front[i].fitness.cv_error);
            CHECK(a.front[i].fitness.cost == c.front[i].fitness.cost);
        }
    }
}

TEST_CASE("select_solution") {
    auto scored = [](double err, double cost, Chromosome c) {
        ScoredChromosome s;
        s.fitness = fr(err, cost);
        s.chromosome = std::move(c);
        return s;
    };
    SUBCASE("minimum cv_error wins over cost") {
        const std::vector<ScoredChromosome> front = {scored(0.10, 2.0, {1}),
                                                     scored(0.12, 1.0, {0})};
        CHECK(select_solution(front) == 0);
    }
    SUBCASE("cost breaks error ties, chromosome order breaks both") {
        const std::vector<ScoredChromosome> front = {scored(0.1, 2.0, {1}),
                                                     scored(0.1, 1.0, {2})};
        CHECK(select_solution(front) == 1);
        const std::vector<ScoredChromosome> tie = {scored(0.1, 1.0, {1, 5}),
                                                   scored(0.1, 1.0, {1, 3})};
        CHECK(select_solution(tie) == 1);
    }
    SUBCASE("singleton front") {
        const std::vector<ScoredChromosome> front = {scored(0.5, 1.0, {0})};
        CHECK(select_solution(front) == 0);
    }
}

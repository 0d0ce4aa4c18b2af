#include "mcsa/nsga2.hpp"

#include "mcsa/parallel.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace mcsa {

bool dominates(const FitnessRecord& a, const FitnessRecord& b) {
    const bool no_worse = a.cv_error <= b.cv_error && a.cost <= b.cost;
    const bool better = a.cv_error < b.cv_error || a.cost < b.cost;
    return no_worse && better;
}

std::vector<std::vector<int>> non_dominated_sort(const std::vector<FitnessRecord>& points) {
    const auto n = static_cast<int>(points.size());
    std::vector<std::vector<int>> dominated(static_cast<std::size_t>(n));
    std::vector<int> dom_count(static_cast<std::size_t>(n), 0);

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]))
                dominated[static_cast<std::size_t>(i)].push_back(j);
            else if (dominates(points[static_cast<std::size_t>(j)],
                               points[static_cast<std::size_t>(i)]))
                ++dom_count[static_cast<std::size_t>(i)];
        }

    std::vector<std::vector<int>> fronts;
    std::vector<int> current;
    for (int i = 0; i < n; ++i)
        if (dom_count[static_cast<std::size_t>(i)] == 0) current.push_back(i);
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<int> next;
        for (int i : current)
            for (int j : dominated[static_cast<std::size_t>(i)])
                if (--dom_count[static_cast<std::size_t>(j)] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<FitnessRecord>& points,
                                      const std::vector<int>& front) {
    const auto m = front.size();
    std::vector<double> dist(m, 0.0);
    if (m <= 2) {
        for (auto& d : dist) d = std::numeric_limits<double>::infinity();
        return dist;
    }
    auto objective = [&](int idx, int obj) {
        const auto& p = points[static_cast<std::size_t>(idx)];
        return obj == 0 ? p.cv_error : p.cost;
    };
    for (int obj = 0; obj < 2; ++obj) {
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return objective(front[a], obj) < objective(front[b], obj);
        });
        const double lo = objective(front[order.front()], obj);
        const double hi = objective(front[order.back()], obj);
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (hi == lo) continue;
        for (std::size_t i = 1; i + 1 < m; ++i)
            dist[order[i]] += (objective(front[order[i + 1]], obj) -
                               objective(front[order[i - 1]], obj)) /
                              (hi - lo);
    }
    return dist;
}

namespace {

struct RankedPopulation {
    std::vector<int> rank;
    std::vector<double> crowding;
};

RankedPopulation rank_population(const std::vector<FitnessRecord>& fit) {
    RankedPopulation rp;
    rp.rank.assign(fit.size(), 0);
    rp.crowding.assign(fit.size(), 0.0);
    const auto fronts = non_dominated_sort(fit);
    for (std::size_t fi = 0; fi < fronts.size(); ++fi) {
        const auto cd = crowding_distance(fit, fronts[fi]);
        for (std::size_t i = 0; i < fronts[fi].size(); ++i) {
            rp.rank[static_cast<std::size_t>(fronts[fi][i])] = static_cast<int>(fi);
            rp.crowding[static_cast<std::size_t>(fronts[fi][i])] = cd[i];
        }
    }
    return rp;
}

// Evaluate every not-yet-seen chromosome, in order, possibly in parallel.
// Each chromosome's evaluation seed derives from its own content so results
// do not depend on discovery order or thread count.
void evaluate_all(const SearchSpace& space, const FeatureMatrix* base_features,
                  const Dataset& source, const std::vector<GroupedSplit>& folds,
                  const EvolveConfig& cfg, const std::vector<Chromosome>& todo,
                  std::map<Chromosome, FitnessRecord>& memo) {
    std::vector<Chromosome> fresh;
    for (const auto& c : todo)
        if (!memo.count(c) &&
            std::find(fresh.begin(), fresh.end(), c) == fresh.end())
            fresh.push_back(c);
    std::vector<FitnessRecord> results(fresh.size());
    parallel_for(fresh.size(), cfg.jobs, [&](std::size_t i) {
        const PipelinePlan plan = decode(space, fresh[i]);
        const std::uint64_t eval_seed =
            derive_seed(cfg.seed, "eval", chromosome_key(fresh[i]));
        if (base_features != nullptr)
            results[i] = evaluate_plan_features(plan, *base_features, folds, eval_seed,
                                                cfg.cost_mode);
        else
            results[i] = evaluate_plan(plan, source, folds, eval_seed, cfg.cost_mode);
    });
    for (std::size_t i = 0; i < fresh.size(); ++i) memo.emplace(fresh[i], results[i]);
}

}  // namespace

EvolveResult evolve(const SearchSpace& space, const Dataset& source, const EvolveConfig& cfg) {
    if (cfg.pop_size < 4) throw Error("evolve: population size must be >= 4");
    if (cfg.generations < 0) throw Error("evolve: generations must be >= 0");
    validate_dataset(source);

    const double mutation_rate =
        cfg.mutation_rate >= 0.0 ? cfg.mutation_rate
                                 : 1.0 / static_cast<double>(space.genes.size());
    const auto folds =
        make_grouped_folds(source, cfg.cv_folds, cfg.cv_repeats, derive_seed(cfg.seed, "cv"));

    // Reduced spaces (fixed preprocessing) share one feature extraction.
    const bool fixed_preprocessing = space.index_of("b_10") < 0;
    FeatureMatrix base_features;
    if (fixed_preprocessing)
        base_features = extract_plan_features(space.prototype, source);
    const FeatureMatrix* base = fixed_preprocessing ? &base_features : nullptr;

    Rng rng(derive_seed(cfg.seed, "evolve"));
    std::vector<Chromosome> population;
    population.reserve(static_cast<std::size_t>(cfg.pop_size));
    for (int i = 0; i < cfg.pop_size; ++i) population.push_back(space.random_chromosome(rng));

    std::map<Chromosome, FitnessRecord> memo;
    evaluate_all(space, base, source, folds, cfg, population, memo);

    auto fitness_of = [&](const std::vector<Chromosome>& pop) {
        std::vector<FitnessRecord> out;
        out.reserve(pop.size());
        for (const auto& c : pop) out.push_back(memo.at(c));
        return out;
    };

    EvolveResult result;
    auto log_generation = [&](int gen) {
        const auto fit = fitness_of(population);
        GenerationStats gs;
        gs.generation = gen;
        std::vector<double> errs;
        gs.best_cost = fit.front().cost;
        for (const auto& f : fit) {
            errs.push_back(f.cv_error);
            if (f.cv_error < gs.best_err ||
                (f.cv_error == gs.best_err && f.cost < gs.best_cost)) {
                gs.best_err = f.cv_error;
                gs.best_cost = f.cost;
            }
        }
        std::sort(errs.begin(), errs.end());
        gs.median_err = errs[errs.size() / 2];
        result.history.push_back(gs);
    };
    log_generation(0);

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        const auto fit = fitness_of(population);
        const auto ranked = rank_population(fit);

        auto tournament = [&]() -> const Chromosome& {
            const auto a = static_cast<std::size_t>(rng.uniform_int(population.size()));
            const auto b = static_cast<std::size_t>(rng.uniform_int(population.size()));
            if (ranked.rank[a] != ranked.rank[b])
                return population[ranked.rank[a] < ranked.rank[b] ? a : b];
            if (ranked.crowding[a] != ranked.crowding[b])
                return population[ranked.crowding[a] > ranked.crowding[b] ? a : b];
            return population[std::min(a, b)];
        };

        std::vector<Chromosome> offspring;
        offspring.reserve(static_cast<std::size_t>(cfg.pop_size));
        for (int i = 0; i < cfg.pop_size; ++i) {
            const Chromosome& pa = tournament();
            const Chromosome& pb = tournament();
            Chromosome child = pa;
            if (rng.uniform() < cfg.crossover_rate)
                for (std::size_t g = 0; g < child.size(); ++g)
                    if (rng.uniform() < 0.5) child[g] = pb[g];
            for (std::size_t g = 0; g < child.size(); ++g) {
                const auto domain = space.genes[g].options.size();
                if (domain > 1 && rng.uniform() < mutation_rate) {
                    const auto shift = 1 + rng.uniform_int(domain - 1);
                    child[g] = static_cast<int>(
                        (static_cast<std::size_t>(child[g]) + shift) % domain);
                }
            }
            offspring.push_back(std::move(child));
        }
        evaluate_all(space, base, source, folds, cfg, offspring, memo);

        // (mu+lambda) survival: fill by fronts, truncate the last one by
        // crowding distance (ties toward the lower combined index).
        std::vector<Chromosome> combined = population;
        combined.insert(combined.end(), offspring.begin(), offspring.end());
        const auto comb_fit = fitness_of(combined);
        const auto fronts = non_dominated_sort(comb_fit);

        std::vector<Chromosome> next;
        for (const auto& front : fronts) {
            if (static_cast<int>(next.size()) >= cfg.pop_size) break;
            if (static_cast<int>(next.size() + front.size()) <= cfg.pop_size) {
                for (int idx : front)
                    next.push_back(combined[static_cast<std::size_t>(idx)]);
            } else {
                const auto cd = crowding_distance(comb_fit, front);
                std::vector<std::size_t> order(front.size());
                for (std::size_t i = 0; i < front.size(); ++i) order[i] = i;
                std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    if (cd[a] != cd[b]) return cd[a] > cd[b];
                    return front[a] < front[b];
                });
                for (std::size_t i = 0; static_cast<int>(next.size()) < cfg.pop_size; ++i)
                    next.push_back(combined[static_cast<std::size_t>(front[order[i]])]);
            }
        }
        population = std::move(next);
        log_generation(gen);
    }

    // Final non-dominated set, deduplicated by chromosome.
    const auto fit = fitness_of(population);
    const auto fronts = non_dominated_sort(fit);
    std::vector<Chromosome> seen;
    for (int idx : fronts.front()) {
        const auto& c = population[static_cast<std::size_t>(idx)];
        if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
        seen.push_back(c);
        result.front.push_back({c, fit[static_cast<std::size_t>(idx)]});
    }
    for (std::size_t i = 0; i < population.size(); ++i)
        result.population.push_back({population[i], fit[i]});
    return result;
}

std::size_t select_solution(const std::vector<ScoredChromosome>& front) {
    if (front.empty()) throw Error("select_solution: empty front");
    std::size_t best = 0;
    for (std::size_t i = 1; i < front.size(); ++i) {
        const auto& a = front[i].fitness;
        const auto& b = front[best].fitness;
        if (a.cv_error < b.cv_error ||
            (a.cv_error == b.cv_error && a.cost < b.cost) ||
            (a.cv_error == b.cv_error && a.cost == b.cost &&
             front[i].chromosome < front[best].chromosome))
            best = i;
    }
    return best;
}

}  // namespace mcsa

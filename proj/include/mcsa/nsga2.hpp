#pragma once

#include "mcsa/evaluate.hpp"
#include "mcsa/search_space.hpp"

namespace mcsa {

/// a dominates b: <= on both objectives, < on at least one.
bool dominates(const FitnessRecord& a, const FitnessRecord& b);

/// Fast non-dominated sorting; fronts partition the input indices and front i
/// members are dominated only by members of earlier fronts.
std::vector<std::vector<int>> non_dominated_sort(const std::vector<FitnessRecord>& points);

/// NSGA-II crowding distance within one front: boundary members get +inf,
/// interior members the normalized cuboid sum over both objectives.
std::vector<double> crowding_distance(const std::vector<FitnessRecord>& points,
                                      const std::vector<int>& front);

struct EvolveConfig {
    int generations = 20;
    int pop_size = 10;
    double crossover_rate = 0.9;
    double mutation_rate = -1.0;  // < 0 selects 1 / n_genes
    std::uint64_t seed = 0;
    CostMode cost_mode = CostMode::Surrogate;
    int jobs = 1;
    int cv_folds = 5;
    int cv_repeats = 3;
};

struct ScoredChromosome {
    Chromosome chromosome;
    FitnessRecord fitness;
};

struct GenerationStats {
    int generation = 0;
    double best_err = 1.0;
    double median_err = 1.0;
    double best_cost = 0.0;
};

struct EvolveResult {
    std::vector<ScoredChromosome> front;       // non-dominated set, deduplicated
    std::vector<ScoredChromosome> population;  // final population
    std::vector<GenerationStats> history;
};

/// Elitist (mu+lambda) NSGA-II over the search space: uniform seeded
/// initialization, binary tournament on (rank, crowding), uniform per-gene
/// crossover and uniform reset mutation. Deterministic for a fixed seed in
/// surrogate cost mode, independent of the job count.
EvolveResult evolve(const SearchSpace& space, const Dataset& source, const EvolveConfig& cfg);

/// Minimum cv_error, ties by lower cost then lexicographically smaller
/// chromosome. Takes only the front: target-domain data cannot reach it.
std::size_t select_solution(const std::vector<ScoredChromosome>& front);

}  // namespace mcsa

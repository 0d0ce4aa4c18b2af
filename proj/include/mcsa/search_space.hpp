#pragma once

#include "mcsa/pipeline.hpp"
#include "mcsa/rng.hpp"

#include <string>
#include <vector>

namespace mcsa {

/// One admissible value of a gene: a display label plus its numeric value
/// (flags use 0/1, categorical genes index their label).
struct GeneOption {
    std::string label;
    double value = 0.0;
};

struct GeneSpec {
    std::string id;
    char stage = 'A';
    std::vector<GeneOption> options;

    int find_value(double v) const;
    int find_label(const std::string& l) const;
};

/// A chromosome stores one option index per gene, in search-space order.
using Chromosome = std::vector<int>;

std::uint64_t chromosome_key(const Chromosome& c);

/// Ordered gene list plus a prototype plan supplying the values of every
/// pipeline field not covered by a gene (used by the reduced classifier
/// comparison spaces).
struct SearchSpace {
    std::string version;
    std::vector<GeneSpec> genes;
    PipelinePlan prototype;

    int index_of(const std::string& id) const;  // -1 when absent
    void validate(const Chromosome& c) const;
    Chromosome random_chromosome(Rng& rng) const;

    /// The full pipeline search space: stage A-D genes plus activation flags
    /// and the reducer choice.
    static SearchSpace default_space();

    /// Stage-D-only space over a fixed preprocessing plan, for the classifier
    /// comparison.
    static SearchSpace classifier_space(Algorithm a);
};

/// Total decode: every chromosome in the gene product space yields a plan.
/// Combinations infeasible for the dataset shape (Park on fewer than three
/// channels) are repaired deterministically and noted on the plan.
PipelinePlan decode(const SearchSpace& space, const Chromosome& c, int n_channels = 3);

/// Reconstructs the chromosome from a plan's field values. Inverse of decode
/// for any unrepaired plan.
Chromosome encode(const SearchSpace& space, const PipelinePlan& plan);

/// The fixed reference pipeline: raw channel, 1024-sample non-overlapping
/// windows, FFT + time features, min-max scaling, default gradient boosting.
Chromosome baseline_chromosome(const SearchSpace& space);

}  // namespace mcsa

#pragma once

#include "mcsa/types.hpp"

#include <cstdint>
#include <vector>

namespace mcsa {

/// Grouped, class-stratified k-fold assignments, one GroupedSplit per repeat.
/// Pure function of (dataset serials + labels, k, repeats, seed): fold
/// serial-counts differ by at most 1 within a repeat and each fold holds both
/// classes whenever counts allow. Throws on fewer distinct serials than k or a
/// single-class dataset.
std::vector<GroupedSplit> make_grouped_folds(const Dataset& d, int k, int repeats,
                                             std::uint64_t seed);

}  // namespace mcsa

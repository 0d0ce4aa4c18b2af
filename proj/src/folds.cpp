#include "mcsa/folds.hpp"

#include "mcsa/rng.hpp"

#include <algorithm>
#include <map>

namespace mcsa {

std::set<std::string> GroupedSplit::fold_serials(int fold) const {
    std::set<std::string> out;
    for (const auto& [serial, f] : fold_assignments)
        if (f == fold) out.insert(serial);
    return out;
}

std::vector<GroupedSplit> make_grouped_folds(const Dataset& d, int k, int repeats,
                                             std::uint64_t seed) {
    if (k < 2) throw Error("make_grouped_folds: k must be >= 2");
    if (repeats < 1) throw Error("make_grouped_folds: repeats must be >= 1");

    // serial -> label, sorted by serial so the result only depends on the set
    // of serials, never on record order.
    std::map<std::string, Label> by_serial;
    for (const auto& r : d.records) by_serial[r.motor.serial] = r.motor.label;

    if (static_cast<int>(by_serial.size()) < k)
        throw Error("make_grouped_folds: only " + std::to_string(by_serial.size()) +
                    " distinct serials for k=" + std::to_string(k));

    std::vector<std::string> healthy, faulty;
    for (const auto& [serial, label] : by_serial)
        (label == Label::Healthy ? healthy : faulty).push_back(serial);
    if (healthy.empty() || faulty.empty())
        throw Error("make_grouped_folds: single-class dataset");

    std::vector<GroupedSplit> splits;
    splits.reserve(static_cast<std::size_t>(repeats));
    for (int rep = 0; rep < repeats; ++rep) {
        Rng rng(derive_seed(seed, "grouped_folds", static_cast<std::uint64_t>(rep)));
        auto h = healthy;
        auto f = faulty;
        rng.shuffle(h);
        rng.shuffle(f);

        // Deal class by class with a running fold index: per-class counts stay
        // as even as possible and total fold sizes differ by at most one.
        GroupedSplit split;
        split.k = k;
        split.repeat_seed = rep;
        int idx = 0;
        for (const auto* cls : {&h, &f})
            for (const auto& serial : *cls) split.fold_assignments[serial] = idx++ % k;
        splits.push_back(std::move(split));
    }
    return splits;
}

}  // namespace mcsa

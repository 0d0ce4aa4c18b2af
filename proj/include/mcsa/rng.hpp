#pragma once

#include "mcsa/common.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace mcsa {

/// Derive a child seed from (seed, label). All module substreams flow from one
/// root seed through this function, so runs are reproducible regardless of
/// thread count or evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, const std::string& label) {
    std::uint64_t h = fnv1a(label);
    h ^= seed + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, const std::string& label, std::uint64_t n) {
    return derive_seed(derive_seed(seed, label), std::to_string(n));
}

/// Small deterministic generator (splitmix64). The standard <random>
/// distributions are implementation-defined, which would break byte-identical
/// artifacts across platforms, so sampling is done by hand here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    /// Standard normal via Box-Muller (no cached spare, call order stable).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Fisher-Yates shuffle of an index-addressable container.
    template <class C>
    void shuffle(C& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace mcsa

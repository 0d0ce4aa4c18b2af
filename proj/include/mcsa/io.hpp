#pragma once

#include "mcsa/types.hpp"

#include <cstdint>
#include <filesystem>

namespace mcsa {

/// Read a dataset from NDJSON (one record object per line). Parse errors name
/// the line, invariant violations name the record and field.
Dataset load_dataset(const std::filesystem::path& path);

/// Write NDJSON so that load_dataset(save_dataset(d)) == d bit-for-bit on all
/// numeric fields.
void save_dataset(const Dataset& d, const std::filesystem::path& path);

/// JSON map serial -> fold, for audit.
void export_split(const GroupedSplit& split, const std::filesystem::path& path);

/// Order-sensitive fingerprint over every numeric and string field.
std::uint64_t dataset_fingerprint(const Dataset& d);

}  // namespace mcsa

#pragma once

#include "mcsa/nsga2.hpp"

#include <filesystem>

namespace mcsa {

/// Everything needed to audit and redeploy one optimization outcome: the
/// selected chromosome and plan, its fitness, the fitted stages, the final
/// front and history, and provenance (seed, dataset fingerprint, versions).
struct PipelineArtifact {
    std::string tool_version = kToolVersion;
    std::string space_version;
    std::uint64_t seed = 0;
    std::uint64_t dataset_fingerprint = 0;
    Chromosome chromosome;
    PipelinePlan plan;
    FitnessRecord fitness;
    FittedPipeline fitted;
    std::vector<ScoredChromosome> front;
    std::vector<GenerationStats> history;

    nlohmann::json to_json() const;
    static PipelineArtifact from_json(const nlohmann::json& j);

    /// Writes JSON with an embedded payload checksum.
    void save(const std::filesystem::path& path) const;

    /// Throws Error mentioning "artifact integrity" on checksum or version
    /// mismatch.
    static PipelineArtifact load(const std::filesystem::path& path);
};

void export_history_csv(const std::vector<GenerationStats>& history,
                        const std::filesystem::path& path);

}  // namespace mcsa

#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "collegium/archive.hpp"
#include "collegium/backend.hpp"
#include "collegium/directives.hpp"
#include "collegium/embedding.hpp"
#include "collegium/evolution.hpp"
#include "collegium/retrieval.hpp"
#include "collegium/workflow.hpp"

namespace collegium {

struct RunPaths {
    std::string statutes;
    std::string corpus;
    std::string memory_dir;
    std::string output_dir;
    std::string prompts_dir;  // optional template overrides

    bool operator==(const RunPaths&) const = default;
};

// One config file drives every command; flags override individual fields.
struct RunConfig {
    RunPaths paths;
    PanelConfig panel;
    RetrievalOptions scoring;
    int seed_k = 5;
    int hops = 2;
    EvolutionConfig evolution;
    DirectiveBaseConfig directives;
    ArchiveConfig archive;
    EmbeddingProviderConfig embedding;
    std::map<std::string, AgentBackendConfig> backends;  // keyed by role name
    std::vector<int> term_bins;  // upper month bounds; empty = standard table
    uint64_t seed = 0;
    int concurrency = 1;
    bool archive_enabled = true;
    int alignment_candidates = 5;  // statute candidates per alignment sample
    int max_reflections = 3;

    bool operator==(const RunConfig&) const = default;

    TermBinning binning() const {
        return term_bins.empty() ? TermBinning::standard() : TermBinning(term_bins);
    }
};

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& config, const std::string& path);

// Checks cross-field invariants and that referenced input paths exist.
void validate_config(const RunConfig& config, bool check_paths = true);

}  // namespace collegium

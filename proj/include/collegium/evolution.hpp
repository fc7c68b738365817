#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "collegium/archive.hpp"
#include "collegium/backend.hpp"
#include "collegium/directives.hpp"
#include "collegium/prompts.hpp"

namespace collegium {

struct EvolutionConfig {
    int batch_threshold = 20;       // new standards that trigger a cycle
    int min_cluster_size = 3;       // homogeneous group size feeding induction
    int consolidation_period = 3;   // cycles between consolidation passes
    double similarity_merge_threshold = 0.9;

    bool operator==(const EvolutionConfig&) const = default;
};

// Success/failure trajectory pair sharing the gold label set.
struct ContrastivePair {
    int positive_node_id = -1;
    FailureEntry negative;
};

struct CycleReport {
    int cycle_index = 0;
    int batch_size = 0;
    int adds = 0;           // phase A inductions
    int fallback_adds = 0;  // phase B pairs with no directive to refine
    int refines = 0;
    int keeps = 0;
    int prune_votes = 0;    // contradicted outcomes recorded in phase B
    int pruned = 0;         // directives removed by the closing prune
    int merges = 0;         // phase C consolidations
    int pairs_built = 0;
    int pairs_skipped = 0;  // failures with no matching archived standard
    int meta_failures = 0;  // unparseable meta replies, skipped
    bool consolidation_ran = false;

    nlohmann::json to_json() const;
};

// Batch-triggered translation of standards into micro-directives:
// cluster, induce, contrast-refine, periodically consolidate, prune.
class EvolutionEngine {
public:
    EvolutionEngine(EvolutionConfig config, const PromptLibrary* prompts,
                    std::shared_ptr<const EmbeddingProvider> embedder)
        : config_(config), prompts_(prompts), embedder_(std::move(embedder)) {}

    // True iff the pending batch reached the threshold; firing freezes the
    // batch and resets the counter.
    bool maybe_trigger(StandardsArchive& archive) const;

    // Freezes whatever is pending regardless of the threshold (forced runs).
    void force_trigger(StandardsArchive& archive) const;

    // Requires a prior trigger; consumes the frozen batch and the failure
    // buffer. A phase error never rolls back completed earlier phases.
    CycleReport run_cycle(StandardsArchive& archive, DirectiveBase& base,
                          AgentBackend& meta);

    // Phase A over an explicit batch of newly archived node ids.
    std::vector<int> phase_a_induce(StandardsArchive& archive, DirectiveBase& base,
                                    AgentBackend& meta, const std::vector<int>& batch,
                                    CycleReport* report = nullptr);

    // One pair per drained failure: the cosine-nearest archived node whose
    // label set equals the failure's gold labels. Unmatched failures are
    // dropped and counted.
    std::vector<ContrastivePair> build_contrastive_pairs(
        const StandardsArchive& archive, std::vector<FailureEntry> failures,
        CycleReport* report = nullptr) const;

    void phase_b_refine(const std::vector<ContrastivePair>& pairs,
                        const StandardsArchive& archive, DirectiveBase& base,
                        AgentBackend& meta, CycleReport* report = nullptr);

    void phase_c_consolidate(DirectiveBase& base, AgentBackend& meta,
                             CycleReport* report = nullptr);

    long cycles_run() const { return cycles_run_; }
    void set_cycles_run(long cycles) { cycles_run_ = cycles; }
    const EvolutionConfig& config() const { return config_; }

private:
    EvolutionConfig config_;
    const PromptLibrary* prompts_;
    std::shared_ptr<const EmbeddingProvider> embedder_;
    long cycles_run_ = 0;
};

}  // namespace collegium

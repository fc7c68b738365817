#pragma once

#include <memory>
#include <string>
#include <vector>

#include "collegium/alignment.hpp"
#include "collegium/config.hpp"
#include "collegium/evolution.hpp"
#include "collegium/metrics.hpp"
#include "collegium/trace.hpp"
#include "collegium/workflow.hpp"

namespace collegium {

// Runtime state loaded from a RunConfig. Heap-pinned because the evolution
// engine keeps a pointer to the prompt library.
struct World {
    std::shared_ptr<EmbeddingProvider> embedder;
    StatuteLibrary library;
    PromptLibrary prompts;
    std::unique_ptr<StandardsArchive> archive;
    std::unique_ptr<DirectiveBase> directives;
    BackendSet backends;
    std::unique_ptr<EvolutionEngine> evolution;

    PanelEnvironment panel_env(const RunConfig& config) const;
    void save_memory(const RunConfig& config) const;
};

std::unique_ptr<World> load_world(const RunConfig& config);

struct InferReport {
    int cases = 0;
    int evaluated = 0;
    int skipped = 0;
    int archived = 0;
    int buffered = 0;
    int evolution_cycles = 0;
    bool has_metrics = false;
    MetricsReport metrics;
    std::vector<std::string> trace_files;
};

// Batch inference over the corpus: per-case traces, predictions file,
// metrics report; archives gold cases and fires evolution when the batch
// threshold is reached. Per-case failures are counted and skipped.
InferReport cmd_infer(const RunConfig& config, World& world);

struct EvolveOutcome {
    bool ran = false;
    CycleReport report;
};

// One evolution cycle; `force` fires regardless of the batch threshold.
EvolveOutcome cmd_evolve(const RunConfig& config, World& world, bool force);

struct AlignmentReport {
    DistillReport distill;
    int trajectories = 0;
    int corrected = 0;
    int pairs = 0;
    std::string sft_path;
    std::string faults_path;
    std::string pairs_path;
};

// Teacher distillation into sft.jsonl / faults.jsonl, then label-guided
// reflection over the faults into dpo_pairs.jsonl.
AlignmentReport cmd_build_alignment_data(const RunConfig& config, World& world);

// Re-checks a recorded trace: parsed values and branch decisions must
// reproduce byte-identically.
ReplayReport cmd_replay(const std::string& trace_path);

// Joins a predictions file with the corpus gold labels.
MetricsReport cmd_evaluate(const RunConfig& config, const std::string& predictions_path);

}  // namespace collegium

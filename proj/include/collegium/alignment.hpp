#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "collegium/backend.hpp"
#include "collegium/domain.hpp"
#include "collegium/prompts.hpp"
#include "collegium/protocol.hpp"
#include "collegium/statutes.hpp"

namespace collegium {

// One teacher-verified instruction sample: the draft protocol text whose
// article matches gold.
struct SftSample {
    std::string case_id;
    std::string fact;
    std::vector<int> candidates;
    Draft target;
};

// A teacher miss, kept for the reflection stage.
struct FaultRecord {
    std::string case_id;
    std::string fact;
    std::vector<int> candidates;
    Draft predicted;
    int gold_article = 0;
};

struct ReflectionAttempt {
    Draft prediction;
    std::string reflection;  // the advice that preceded this attempt
};

struct ReflectionTrajectory {
    FaultRecord fault;
    std::vector<ReflectionAttempt> attempts;
    std::optional<int> corrected_at;  // 1-based attempt index
};

struct PreferencePair {
    std::string prompt;
    std::string chosen;    // corrected prediction, protocol text
    std::string rejected;  // the initial wrong prediction
};

struct DistillReport {
    int sft_count = 0;
    int fault_count = 0;
    int skipped = 0;
};

// Teacher distillation with the strict gold filter: correct drafts stream to
// `sft_out`, misses to `fault_out` (and the returned list); unparseable
// teacher replies are skipped and counted.
DistillReport distill_sft_set(const std::vector<CaseRecord>& corpus,
                              AgentBackend& teacher, const StatuteLibrary& library,
                              const PromptLibrary& prompts, int candidates_k,
                              std::ostream& sft_out, std::ostream& fault_out,
                              std::vector<FaultRecord>* faults = nullptr);

// Iterative label-guided reflection: the reflector (which sees gold) advises,
// the expert re-predicts with the accumulated advice; stops at the first
// correct article or after max_iters attempts.
ReflectionTrajectory reflection_loop(const FaultRecord& fault, AgentBackend& reflector,
                                     AgentBackend& expert, const StatuteLibrary& library,
                                     const PromptLibrary& prompts, int max_iters);

// One pair per corrected trajectory: winner = corrected attempt, loser = the
// initial wrong prediction; both share the rendered fact+candidates prompt.
std::vector<PreferencePair> build_preference_pairs(
    const std::vector<ReflectionTrajectory>& trajectories, const StatuteLibrary& library,
    const PromptLibrary& prompts);

// Shared prompt rendering (fact + candidate statutes) used as the pair prompt.
std::string alignment_prompt(const std::string& fact, const std::vector<int>& candidates,
                             const StatuteLibrary& library, const PromptLibrary& prompts);

nlohmann::json sft_to_json(const SftSample& sample);
nlohmann::json fault_to_json(const FaultRecord& fault);
FaultRecord fault_from_json(const nlohmann::json& j);
nlohmann::json pair_to_json(const PreferencePair& pair);

}  // namespace collegium

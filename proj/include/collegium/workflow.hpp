#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collegium/archive.hpp"
#include "collegium/backend.hpp"
#include "collegium/directives.hpp"
#include "collegium/domain.hpp"
#include "collegium/errors.hpp"
#include "collegium/protocol.hpp"
#include "collegium/prompts.hpp"
#include "collegium/retrieval.hpp"
#include "collegium/statutes.hpp"
#include "collegium/trace.hpp"

namespace collegium {

struct PanelConfig {
    int t_max = 3;          // maximum draft-review turns
    int coarse_k = 10;      // statute search width feeding the assistant
    int retrieve_n = 3;     // standards and directives injected per case
    bool memory_enabled = true;

    bool operator==(const PanelConfig&) const = default;
};

enum class FinalFlag { Pass, ForcedByTmax };

const char* final_flag_name(FinalFlag flag);

enum class BranchOutcome { ToVerdict, Redraft };

// To verdict iff the supervisor passed or the turn limit is reached.
BranchOutcome branch(const ReviewDecision& decision, int turn, int t_max);

void accumulate_feedback(std::vector<std::string>& history, const std::string& fdbk);

// "1. first\n2. second"; "(none)" when empty.
std::string render_feedback(const std::vector<std::string>& history);

struct CaseResult {
    std::string case_id;
    Verdict verdict;
    std::vector<int> ranked_articles;  // for hit@2, first element = verdict article
    int turns_used = 0;
    FinalFlag final_flag = FinalFlag::Pass;
    Trace trace;

    // Intermediate panel state, kept for archiving and inspection.
    std::vector<std::string> fact_points;
    std::vector<int> candidate_statutes;
    std::vector<Draft> drafts;
    std::vector<std::string> feedback_history;
    std::vector<ScoredStandard> injected_standards;
    std::vector<ScoredDirective> injected_directives;
};

// Everything a panel run reads. Archive and directives may be null; with
// memory disabled they are never touched.
struct PanelEnvironment {
    const PromptLibrary* prompts = nullptr;
    BackendSet* backends = nullptr;
    const StatuteLibrary* library = nullptr;
    const StandardsArchive* archive = nullptr;
    const DirectiveBase* directives = nullptr;
    const EmbeddingProvider* embedder = nullptr;
    PanelConfig panel;
    int seed_k = 5;
    int hops = 2;
    RetrievalOptions scoring;
};

// Thrown when a backend or protocol failure aborts a case; carries the
// partial trace so batch drivers can persist it.
class CaseAbortError : public Error {
public:
    CaseAbortError(const Error& cause, Trace trace)
        : Error(cause.kind(), cause.message()), trace_(std::move(trace)) {}

    const Trace& trace() const { return trace_; }

private:
    Trace trace_;
};

// Executes one case through the full panel:
// clerk -> assistant -> (judge <-> supervisor)* -> presiding.
CaseResult run_case(const CaseRecord& case_record, const PanelEnvironment& env);

// Serialized reasoning chain of a finished panel run (the text archived
// alongside the verdict).
std::string reasoning_trace_text(const CaseResult& result);

// Statute rendering shared by prompt slots: "Article <id> (<title>): <text>".
std::string render_statutes(const std::vector<int>& ids, const StatuteLibrary& library);

}  // namespace collegium

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "collegium/domain.hpp"

namespace collegium {

// Case-handling judge draft: a bare object, single- or double-quoted keys:
//   {'predicted_article': <int>, 'explanation': '<basis>'}
struct Draft {
    int predicted_article = 0;
    std::string explanation;

    bool operator==(const Draft&) const = default;
};

// Supervisor verdict on a draft:
//   Finish[{"need_rejudge": <bool>, "suggestions": "<advice>"}]
// need_rejudge == false means Pass.
struct ReviewDecision {
    bool need_rejudge = false;
    std::string suggestions;

    bool operator==(const ReviewDecision&) const = default;
};

// Final decision:
//   Finish[{"relevant_articles": [int], "accusation": [str],
//           "term_of_imprisonment": {...}}]
// An optional "ranked_articles" list is captured when the backend emits one.
struct PresidingOutput {
    Verdict verdict;
    std::vector<int> ranked_articles;

    bool operator==(const PresidingOutput&) const = default;
};

// Lifecycle decisions of the meta agent:
//   Finish[{"action": "ADD"|"REFINE"|"PRUNE"|"KEEP", "text": "<directive>"}]
struct MetaAction {
    enum class Kind { Add, Refine, Prune, Keep };
    Kind kind = Kind::Keep;
    std::string text;

    bool operator==(const MetaAction&) const = default;
};

// Body of the last balanced Finish[...] in the text. Double-quoted strings
// shield brackets; throws Error(Protocol) when no balanced marker exists.
std::string extract_finish_body(std::string_view text);

// Finish[1. point; 2. point; ...] -> points, ordinals stripped. Empty body ok.
std::vector<std::string> parse_clerk(std::string_view text);

// Finish[[272, 384, 185]] -> ordered ids, later repeats dropped.
std::vector<int> parse_assistant(std::string_view text);

Draft parse_judge(std::string_view text);

ReviewDecision parse_supervisor(std::string_view text);

PresidingOutput parse_presiding(std::string_view text);

MetaAction parse_meta(std::string_view text);

// Formatters emitting canonical protocol text; parse(format(x)) == x.
std::string format_clerk(const std::vector<std::string>& points);
std::string format_assistant(const std::vector<int>& articles);
std::string format_judge(const Draft& draft);
std::string format_supervisor(const ReviewDecision& decision);
std::string format_presiding(const Verdict& verdict);
std::string format_presiding(const PresidingOutput& output);
std::string format_meta(const MetaAction& action);

// Canonical trace/replay JSON for each parsed value.
nlohmann::json draft_to_json(const Draft& draft);
nlohmann::json review_to_json(const ReviewDecision& decision);
nlohmann::json presiding_to_json(const PresidingOutput& output);
nlohmann::json meta_to_json(const MetaAction& action);

}  // namespace collegium

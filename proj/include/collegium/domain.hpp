#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace collegium {

// Penalty term. At most one of the two flags may be set, and a set flag
// forces imprisonment_months to 0.
struct TermOfImprisonment {
    bool death_penalty = false;
    bool life_imprisonment = false;
    int imprisonment_months = 0;

    bool operator==(const TermOfImprisonment&) const = default;
};

// One of the eleven penalty classes (0 = death ... 10 = no imprisonment).
struct TermClass {
    int index = -1;

    bool operator==(const TermClass&) const = default;
};

// Month-interval table mapping a term onto its class. Class 0 is death and
// class 1 is life imprisonment; the remaining classes are half-open month
// intervals (upper[i-2], upper[i-3]] read from `upper_bounds`, ending in a
// dedicated class for exactly zero months. The default table is:
//   2: >120   3: (84,120]   4: (60,84]   5: (36,60]   6: (24,36]
//   7: (12,24]   8: (6,12]   9: (0,6]    10: 0
class TermBinning {
public:
    TermBinning() : upper_bounds_{120, 84, 60, 36, 24, 12, 6} {}
    explicit TermBinning(std::vector<int> upper_bounds);

    TermClass bin(const TermOfImprisonment& term) const;

    // Total number of classes (death + life + intervals + above-top + zero).
    int class_count() const { return static_cast<int>(upper_bounds_.size()) + 4; }

    const std::vector<int>& upper_bounds() const { return upper_bounds_; }

    static const TermBinning& standard();

private:
    std::vector<int> upper_bounds_;  // strictly decreasing, all > 0
};

struct Verdict {
    std::vector<int> articles;
    std::vector<std::string> charges;
    TermOfImprisonment term;

    bool operator==(const Verdict&) const = default;
};

struct CaseRecord {
    std::string id;
    std::string fact_text;
    std::optional<Verdict> gold;
};

// Deduplicated legal metadata carried by archived standards and matched
// against gold verdicts. Equality is element-wise set equality.
struct LabelSet {
    std::set<int> articles;
    std::set<std::string> charges;

    bool operator==(const LabelSet&) const = default;
    auto operator<=>(const LabelSet&) const = default;
};

struct MatchReport {
    bool article_correct = false;
    bool charge_correct = false;
    bool term_correct = false;
    bool all_correct = false;
};

TermClass bin_term(const TermOfImprisonment& term,
                   const TermBinning& binning = TermBinning::standard());

LabelSet label_set(const Verdict& verdict);

MatchReport verdict_matches(const Verdict& pred, const Verdict& gold,
                            const TermBinning& binning = TermBinning::standard());

// Throws Error(Validation) when the value breaks its invariants.
void validate_term(const TermOfImprisonment& term);
void validate_gold_verdict(const Verdict& verdict);

// Canonical JSON body shared by the corpus format, the final-decision
// protocol and archive serialization:
//   {"relevant_articles":[...],"accusation":[...],
//    "term_of_imprisonment":{"death_penalty":...,"life_imprisonment":...,"imprisonment":...}}
nlohmann::json verdict_to_json(const Verdict& verdict);
Verdict verdict_from_json(const nlohmann::json& body);

// One corpus record per line:
//   {"id": ..., "fact": ..., "meta": {"relevant_articles": [...], "accusation": [...],
//    "term_of_imprisonment": {...}}}
// `meta` may be absent for pure-inference records. A missing id is derived
// from the line number.
CaseRecord case_from_json(const nlohmann::json& record, size_t line_no = 0);
nlohmann::json case_to_json(const CaseRecord& record);

std::vector<CaseRecord> load_corpus(const std::string& path);

}  // namespace collegium

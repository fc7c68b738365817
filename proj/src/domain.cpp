#include "collegium/domain.hpp"

#include <algorithm>
#include <fstream>

#include "collegium/errors.hpp"

namespace collegium {

TermBinning::TermBinning(std::vector<int> upper_bounds)
    : upper_bounds_(std::move(upper_bounds)) {
    if (upper_bounds_.empty())
        throw Error(ErrorKind::Config, "term binning needs at least one bound");
    for (size_t i = 0; i < upper_bounds_.size(); ++i) {
        if (upper_bounds_[i] <= 0)
            throw Error(ErrorKind::Config, "term bounds must be positive months");
        if (i > 0 && upper_bounds_[i] >= upper_bounds_[i - 1])
            throw Error(ErrorKind::Config, "term bounds must be strictly decreasing");
    }
}

const TermBinning& TermBinning::standard() {
    static const TermBinning table;
    return table;
}

TermClass TermBinning::bin(const TermOfImprisonment& term) const {
    if (term.death_penalty) return TermClass{0};
    if (term.life_imprisonment) return TermClass{1};
    const int months = term.imprisonment_months;
    if (months == 0) return TermClass{class_count() - 1};
    if (months > upper_bounds_.front()) return TermClass{2};
    // months lies in (upper[i], upper[i-1]] for some i, or in (0, upper.back()].
    for (size_t i = 1; i < upper_bounds_.size(); ++i) {
        if (months > upper_bounds_[i]) return TermClass{static_cast<int>(i) + 2};
    }
    return TermClass{static_cast<int>(upper_bounds_.size()) + 2};
}

TermClass bin_term(const TermOfImprisonment& term, const TermBinning& binning) {
    validate_term(term);
    return binning.bin(term);
}

LabelSet label_set(const Verdict& verdict) {
    LabelSet labels;
    labels.articles.insert(verdict.articles.begin(), verdict.articles.end());
    labels.charges.insert(verdict.charges.begin(), verdict.charges.end());
    return labels;
}

MatchReport verdict_matches(const Verdict& pred, const Verdict& gold,
                            const TermBinning& binning) {
    validate_gold_verdict(gold);
    const LabelSet p = label_set(pred);
    const LabelSet g = label_set(gold);
    MatchReport report;
    report.article_correct = p.articles == g.articles;
    report.charge_correct = p.charges == g.charges;
    report.term_correct = bin_term(pred.term, binning) == bin_term(gold.term, binning);
    report.all_correct =
        report.article_correct && report.charge_correct && report.term_correct;
    return report;
}

void validate_term(const TermOfImprisonment& term) {
    if (term.death_penalty && term.life_imprisonment)
        throw Error(ErrorKind::Validation, "death and life penalty are exclusive");
    if ((term.death_penalty || term.life_imprisonment) && term.imprisonment_months != 0)
        throw Error(ErrorKind::Validation, "months must be 0 with a death/life flag");
    if (term.imprisonment_months < 0)
        throw Error(ErrorKind::Validation, "imprisonment months must be non-negative");
}

void validate_gold_verdict(const Verdict& verdict) {
    if (verdict.articles.empty())
        throw Error(ErrorKind::Validation, "gold verdict has no articles");
    if (verdict.charges.empty())
        throw Error(ErrorKind::Validation, "gold verdict has no charges");
    for (int a : verdict.articles)
        if (a <= 0) throw Error(ErrorKind::Validation, "article ids must be positive");
    validate_term(verdict.term);
}

nlohmann::json verdict_to_json(const Verdict& verdict) {
    return nlohmann::json{
        {"relevant_articles", verdict.articles},
        {"accusation", verdict.charges},
        {"term_of_imprisonment",
         {{"death_penalty", verdict.term.death_penalty},
          {"life_imprisonment", verdict.term.life_imprisonment},
          {"imprisonment", verdict.term.imprisonment_months}}},
    };
}

Verdict verdict_from_json(const nlohmann::json& body) {
    if (!body.is_object())
        throw Error(ErrorKind::Protocol, "verdict body is not an object");
    for (const char* key : {"relevant_articles", "accusation", "term_of_imprisonment"})
        if (!body.contains(key))
            throw Error(ErrorKind::MissingKey, std::string("verdict body lacks ") + key);

    Verdict verdict;
    const auto& articles = body.at("relevant_articles");
    if (!articles.is_array())
        throw Error(ErrorKind::Protocol, "relevant_articles is not a list");
    for (const auto& a : articles) {
        if (!a.is_number_integer())
            throw Error(ErrorKind::Protocol, "relevant_articles holds a non-integer");
        verdict.articles.push_back(a.get<int>());
    }
    const auto& accusation = body.at("accusation");
    if (!accusation.is_array())
        throw Error(ErrorKind::Protocol, "accusation is not a list");
    for (const auto& c : accusation) {
        if (!c.is_string())
            throw Error(ErrorKind::Protocol, "accusation holds a non-string");
        verdict.charges.push_back(c.get<std::string>());
    }

    const auto& term = body.at("term_of_imprisonment");
    if (!term.is_object())
        throw Error(ErrorKind::Protocol, "term_of_imprisonment is not an object");
    for (const char* key : {"death_penalty", "life_imprisonment", "imprisonment"})
        if (!term.contains(key))
            throw Error(ErrorKind::MissingKey, std::string("term lacks ") + key);
    if (!term.at("death_penalty").is_boolean() || !term.at("life_imprisonment").is_boolean())
        throw Error(ErrorKind::Protocol, "term flags must be booleans");
    if (!term.at("imprisonment").is_number_integer())
        throw Error(ErrorKind::Protocol, "imprisonment must be an integer");

    verdict.term.death_penalty = term.at("death_penalty").get<bool>();
    verdict.term.life_imprisonment = term.at("life_imprisonment").get<bool>();
    verdict.term.imprisonment_months = term.at("imprisonment").get<int>();
    if (verdict.term.imprisonment_months < 0)
        throw Error(ErrorKind::Validation, "imprisonment months must be non-negative");
    if (verdict.term.death_penalty && verdict.term.life_imprisonment)
        throw Error(ErrorKind::Validation, "death and life penalty are exclusive");
    // A set flag dominates a redundant month count.
    if (verdict.term.death_penalty || verdict.term.life_imprisonment)
        verdict.term.imprisonment_months = 0;
    return verdict;
}

CaseRecord case_from_json(const nlohmann::json& record, size_t line_no) {
    if (!record.is_object())
        throw Error(ErrorKind::Parse, "corpus record is not an object");
    CaseRecord out;
    if (record.contains("id"))
        out.id = record.at("id").is_string() ? record.at("id").get<std::string>()
                                             : record.at("id").dump();
    else
        out.id = "case-" + std::to_string(line_no);
    if (!record.contains("fact") || !record.at("fact").is_string())
        throw Error(ErrorKind::Parse, "corpus record lacks a string `fact`");
    out.fact_text = record.at("fact").get<std::string>();
    if (out.fact_text.empty())
        throw Error(ErrorKind::Validation, "fact text is empty");
    if (record.contains("meta") && !record.at("meta").is_null()) {
        Verdict gold = verdict_from_json(record.at("meta"));
        validate_gold_verdict(gold);
        out.gold = std::move(gold);
    }
    return out;
}

nlohmann::json case_to_json(const CaseRecord& record) {
    nlohmann::json out{{"id", record.id}, {"fact", record.fact_text}};
    if (record.gold) out["meta"] = verdict_to_json(*record.gold);
    return out;
}

std::vector<CaseRecord> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open corpus " + path);
    std::vector<CaseRecord> cases;
    std::string line;
    size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded())
            throw Error(ErrorKind::Parse,
                        "corpus line " + std::to_string(line_no) + " is not valid JSON");
        CaseRecord c = case_from_json(record, line_no);
        if (!seen.insert(c.id).second)
            throw Error(ErrorKind::DuplicateId,
                        "corpus line " + std::to_string(line_no) + " repeats id " + c.id);
        cases.push_back(std::move(c));
    }
    return cases;
}

}  // namespace collegium

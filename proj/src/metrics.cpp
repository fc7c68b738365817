#include "collegium/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "collegium/errors.hpp"

namespace collegium {

template <typename Label>
SubtaskMetrics classification_metrics(const std::vector<Label>& gold,
                                      const std::vector<Label>& pred,
                                      bool gold_classes_only) {
    if (gold.size() != pred.size() || gold.empty())
        throw Error(ErrorKind::Validation, "metrics need equal, non-empty label lists");

    std::map<Label, long> tp;
    std::map<Label, long> fp;
    std::map<Label, long> fn;
    long correct = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == pred[i]) {
            ++correct;
            ++tp[gold[i]];
        } else {
            ++fp[pred[i]];
            ++fn[gold[i]];
        }
    }

    std::set<Label> classes;
    for (const Label& g : gold) classes.insert(g);
    if (!gold_classes_only)
        for (const Label& p : pred) classes.insert(p);

    double sum_p = 0.0;
    double sum_r = 0.0;
    double sum_f1 = 0.0;
    for (const Label& c : classes) {
        const long tpc = tp.count(c) ? tp[c] : 0;
        const long fpc = fp.count(c) ? fp[c] : 0;
        const long fnc = fn.count(c) ? fn[c] : 0;
        const double p = (tpc + fpc) ? static_cast<double>(tpc) / (tpc + fpc) : 0.0;
        const double r = (tpc + fnc) ? static_cast<double>(tpc) / (tpc + fnc) : 0.0;
        const double f1 = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
        sum_p += p;
        sum_r += r;
        sum_f1 += f1;
    }

    SubtaskMetrics m;
    const double k = static_cast<double>(classes.size());
    m.acc = static_cast<double>(correct) / static_cast<double>(gold.size());
    m.macro_p = sum_p / k;
    m.macro_r = sum_r / k;
    m.macro_f1 = sum_f1 / k;
    return m;
}

template SubtaskMetrics classification_metrics<int>(const std::vector<int>&,
                                                    const std::vector<int>&, bool);
template SubtaskMetrics classification_metrics<std::string>(
    const std::vector<std::string>&, const std::vector<std::string>&, bool);

namespace {

constexpr int kNoArticle = -1;
const std::string kNoCharge = "(none)";

}  // namespace

MetricsReport evaluate(const std::vector<std::pair<CaseResult, Verdict>>& results,
                       int skipped, const EvalOptions& options) {
    if (results.empty()) throw Error(ErrorKind::Validation, "nothing to evaluate");

    std::vector<int> gold_articles;
    std::vector<int> pred_articles;
    std::vector<std::string> gold_charges;
    std::vector<std::string> pred_charges;
    std::vector<int> gold_terms;
    std::vector<int> pred_terms;
    long hit2_article = 0;
    long hit2_charge = 0;
    long article_set_match = 0;
    long charge_set_match = 0;

    for (const auto& [result, gold] : results) {
        validate_gold_verdict(gold);
        const Verdict& pred = result.verdict;

        gold_articles.push_back(gold.articles.front());
        pred_articles.push_back(pred.articles.empty() ? kNoArticle
                                                      : pred.articles.front());
        gold_charges.push_back(gold.charges.front());
        pred_charges.push_back(pred.charges.empty() ? kNoCharge : pred.charges.front());
        gold_terms.push_back(bin_term(gold.term, options.binning).index);
        pred_terms.push_back(bin_term(pred.term, options.binning).index);

        if (label_set(pred).articles == label_set(gold).articles) ++article_set_match;
        if (label_set(pred).charges == label_set(gold).charges) ++charge_set_match;

        const auto& ranked = result.ranked_articles;
        for (size_t i = 0; i < std::min<size_t>(2, ranked.size()); ++i)
            if (ranked[i] == gold.articles.front()) {
                ++hit2_article;
                break;
            }
        for (size_t i = 0; i < std::min<size_t>(2, pred.charges.size()); ++i)
            if (pred.charges[i] == gold.charges.front()) {
                ++hit2_charge;
                break;
            }
    }

    MetricsReport report;
    report.article =
        classification_metrics(gold_articles, pred_articles, options.gold_classes_only);
    report.charge =
        classification_metrics(gold_charges, pred_charges, options.gold_classes_only);
    report.term = classification_metrics(gold_terms, pred_terms, options.gold_classes_only);
    const double n = static_cast<double>(results.size());
    if (!options.first_label_only) {
        report.article.acc = article_set_match / n;
        report.charge.acc = charge_set_match / n;
    }
    report.hit2_article = hit2_article / n;
    report.hit2_charge = hit2_charge / n;
    report.evaluated = static_cast<int>(results.size());
    report.skipped = skipped;
    return report;
}

nlohmann::json MetricsReport::to_json() const {
    auto subtask = [](const SubtaskMetrics& m) {
        return nlohmann::json{{"acc", m.acc},
                              {"macro_p", m.macro_p},
                              {"macro_r", m.macro_r},
                              {"macro_f1", m.macro_f1}};
    };
    return {{"article", subtask(article)},
            {"charge", subtask(charge)},
            {"term", subtask(term)},
            {"hit2_article", hit2_article},
            {"hit2_charge", hit2_charge},
            {"evaluated", evaluated},
            {"skipped", skipped}};
}

std::string MetricsReport::to_table() const {
    std::ostringstream out;
    auto row = [&](const char* name, const SubtaskMetrics& m) {
        out << name << "  acc=" << m.acc << "  MP=" << m.macro_p << "  MR=" << m.macro_r
            << "  MF1=" << m.macro_f1 << "\n";
    };
    out << "evaluated=" << evaluated << " skipped=" << skipped << "\n";
    row("article", article);
    row("charge ", charge);
    row("term   ", term);
    out << "hit@2 article=" << hit2_article << " charge=" << hit2_charge << "\n";
    return out.str();
}

}  // namespace collegium

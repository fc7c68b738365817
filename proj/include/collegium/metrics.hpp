#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "collegium/domain.hpp"
#include "collegium/workflow.hpp"

namespace collegium {

struct SubtaskMetrics {
    double acc = 0.0;
    double macro_p = 0.0;
    double macro_r = 0.0;
    double macro_f1 = 0.0;
};

struct MetricsReport {
    SubtaskMetrics article;
    SubtaskMetrics charge;
    SubtaskMetrics term;
    double hit2_article = 0.0;
    double hit2_charge = 0.0;
    int evaluated = 0;
    int skipped = 0;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

struct EvalOptions {
    // Score on the first listed article/charge; the alternative scores
    // whole-set exact match for accuracy.
    bool first_label_only = true;
    // Average macro metrics over classes present in gold only; the
    // alternative averages over every class seen in gold or predictions.
    bool gold_classes_only = true;
    TermBinning binning = TermBinning::standard();
};

// Per-class confusion metrics for one label column; macro values averaged
// over the gold-present classes (see EvalOptions). Shared by all subtasks.
template <typename Label>
SubtaskMetrics classification_metrics(const std::vector<Label>& gold,
                                      const std::vector<Label>& pred,
                                      bool gold_classes_only = true);

MetricsReport evaluate(const std::vector<std::pair<CaseResult, Verdict>>& results,
                       int skipped = 0, const EvalOptions& options = {});

}  // namespace collegium

#include <doctest.h>

#include <random>

#include "collegium/errors.hpp"
#include "collegium/metrics.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace collegium;
using fixtures::simple_verdict;

namespace {

CaseResult result_for(const Verdict& verdict, std::vector<int> ranked = {}) {
    CaseResult r;
    r.verdict = verdict;
    r.ranked_articles = ranked.empty() ? verdict.articles : std::move(ranked);
    return r;
}

}  // namespace

TEST_CASE("perfect predictions score 1.0 everywhere") {
    std::vector<std::pair<CaseResult, Verdict>> results;
    for (int i = 0; i < 8; ++i) {
        const Verdict gold = simple_verdict(100 + i % 3, "c" + std::to_string(i % 3),
                                            6 * (i % 4));
        results.emplace_back(result_for(gold), gold);
    }
    const MetricsReport report = evaluate(results);
    CHECK(report.article.acc == 1.0);
    CHECK(report.article.macro_f1 == 1.0);
    CHECK(report.charge.acc == 1.0);
    CHECK(report.term.acc == 1.0);
    CHECK(report.hit2_article == 1.0);
    CHECK(report.hit2_charge == 1.0);
    CHECK(report.evaluated == 8);
}

TEST_CASE("two-class toy set reproduces the hand computation") {
    // gold [A,A,B,B], pred [A,B,B,B] over charges and articles alike.
    const Verdict gold_a = simple_verdict(1, "A", 10);
    const Verdict gold_b = simple_verdict(2, "B", 10);
    const Verdict pred_a = gold_a;
    const Verdict pred_b = gold_b;
    std::vector<std::pair<CaseResult, Verdict>> results{
        {result_for(pred_a), gold_a},
        {result_for(pred_b), gold_a},
        {result_for(pred_b), gold_b},
        {result_for(pred_b), gold_b},
    };
    const MetricsReport report = evaluate(results);
    CHECK(report.article.acc == doctest::Approx(0.75).epsilon(1e-12));
    // class A: P=1, R=0.5, F1=2/3; class B: P=2/3, R=1, F1=0.8.
    CHECK(report.article.macro_p == doctest::Approx((1.0 + 2.0 / 3.0) / 2).epsilon(1e-9));
    CHECK(report.article.macro_r == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(report.article.macro_f1 ==
          doctest::Approx((2.0 / 3.0 + 0.8) / 2).epsilon(1e-9));
    CHECK(report.charge.macro_f1 == doctest::Approx(0.733333333333).epsilon(1e-9));
}

TEST_CASE("gold at rank two counts toward hit@2 but not accuracy") {
    const Verdict gold = simple_verdict(101, "A", 10);
    const Verdict pred = simple_verdict(102, "B", 10);
    std::vector<std::pair<CaseResult, Verdict>> results{
        {result_for(pred, {102, 101}), gold}};
    const MetricsReport report = evaluate(results);
    CHECK(report.article.acc == 0.0);
    CHECK(report.hit2_article == 1.0);
    CHECK(report.hit2_charge == 0.0);
}

TEST_CASE("hit@2 dominates accuracy on random evaluation sets") {
    std::mt19937 rng(123);
    std::uniform_int_distribution<int> article(1, 5);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<CaseResult, Verdict>> results;
        std::uniform_int_distribution<int> size_dist(1, 40);
        const int n = size_dist(rng);
        for (int i = 0; i < n; ++i) {
            const Verdict gold = simple_verdict(article(rng), "c", 10);
            const Verdict pred = simple_verdict(article(rng), "c", 10);
            std::vector<int> ranked = pred.articles;
            if (coin(rng)) ranked.push_back(article(rng));
            results.emplace_back(result_for(pred, ranked), gold);
        }
        const MetricsReport report = evaluate(results);
        CHECK(report.hit2_article >= report.article.acc - 1e-12);
    }
}

TEST_CASE("metrics are permutation invariant") {
    std::mt19937 rng(5);
    std::vector<std::pair<CaseResult, Verdict>> results;
    for (int i = 0; i < 20; ++i) {
        const Verdict gold = oracle::random_gold(rng, 4);
        const Verdict pred = oracle::random_gold(rng, 4);
        results.emplace_back(result_for(pred), gold);
    }
    const MetricsReport a = evaluate(results);
    std::shuffle(results.begin(), results.end(), rng);
    const MetricsReport b = evaluate(results);
    CHECK(a.article.macro_f1 == doctest::Approx(b.article.macro_f1).epsilon(1e-12));
    CHECK(a.charge.acc == doctest::Approx(b.charge.acc).epsilon(1e-12));
    CHECK(a.term.macro_p == doctest::Approx(b.term.macro_p).epsilon(1e-12));
}

TEST_CASE("classification metrics equal the confusion-matrix oracle") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<int> size_dist(1, 200);
        std::uniform_int_distribution<int> label(0, 9);
        const int n = size_dist(rng);
        std::vector<int> gold, pred;
        for (int i = 0; i < n; ++i) {
            gold.push_back(label(rng));
            pred.push_back(label(rng));
        }
        const SubtaskMetrics got = classification_metrics(gold, pred);
        const auto expected = oracle::metrics_reference(gold, pred);
        CHECK(got.acc == doctest::Approx(expected.acc).epsilon(1e-9));
        CHECK(got.macro_p == doctest::Approx(expected.macro_p).epsilon(1e-9));
        CHECK(got.macro_r == doctest::Approx(expected.macro_r).epsilon(1e-9));
        CHECK(got.macro_f1 == doctest::Approx(expected.macro_f1).epsilon(1e-9));
    }
}

TEST_CASE("macro averaging stays over gold-present classes") {
    // Prediction introduces class 9 never present in gold: with gold-classes
    // averaging it contributes nothing to the denominator.
    const std::vector<int> gold{1, 1, 2};
    const std::vector<int> pred{1, 9, 2};
    const SubtaskMetrics m = classification_metrics(gold, pred, true);
    // classes {1,2}: P1=1, R1=0.5, P2=1, R2=1.
    CHECK(m.macro_p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.macro_r == doctest::Approx(0.75).epsilon(1e-12));

    const SubtaskMetrics full = classification_metrics(gold, pred, false);
    CHECK(full.macro_p < m.macro_p);  // class 9 drags the average
}

TEST_CASE("empty inputs are rejected") {
    CHECK_THROWS_AS(evaluate({}), Error);
    CHECK_THROWS_AS(classification_metrics<int>({}, {}), Error);
    CHECK_THROWS_AS(classification_metrics<int>({1}, {}), Error);
}

TEST_CASE("reports serialize with every field") {
    const Verdict gold = simple_verdict(1, "A", 10);
    const MetricsReport report = evaluate({{result_for(gold), gold}}, 2);
    const nlohmann::json j = report.to_json();
    CHECK(j.at("article").at("acc").get<double>() == 1.0);
    CHECK(j.at("skipped").get<int>() == 2);
    CHECK(report.to_table().find("hit@2") != std::string::npos);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "collegium/demo.hpp"
#include "collegium/driver.hpp"
#include "collegium/errors.hpp"

using namespace collegium;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& leaf = "") const {
        return leaf.empty() ? path.string() : (path / leaf).string();
    }
};

int count_lines(const std::string& path) {
    std::ifstream in(path);
    int n = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

// Ten single-turn cases over two statutes; the presiding script controls
// which of them come out fully correct.
RunConfig scripted_config(const TempDir& dir, const std::set<int>& correct) {
    {
        std::ofstream statutes(dir.str("statutes.jsonl"));
        for (int id : {101, 102})
            statutes << nlohmann::json{{"article_id", id},
                                       {"title", "t" + std::to_string(id)},
                                       {"text", "statute text " + std::to_string(id)}}
                            .dump()
                     << "\n";
        std::ofstream corpus(dir.str("cases.jsonl"));
        for (int i = 0; i < 10; ++i) {
            Verdict gold;
            gold.articles = {101 + i % 2};
            gold.charges = {"charge-" + std::to_string(101 + i % 2)};
            gold.term.imprisonment_months = 12;
            CaseRecord record;
            record.id = "d" + std::to_string(i);
            record.fact_text = "case facts " + std::to_string(i);
            record.gold = gold;
            corpus << case_to_json(record).dump() << "\n";
        }
    }
    RunConfig config;
    config.paths.statutes = dir.str("statutes.jsonl");
    config.paths.corpus = dir.str("cases.jsonl");
    config.paths.memory_dir = dir.str("memory");
    config.paths.output_dir = dir.str("out");

    AgentBackendConfig clerk;
    clerk.kind = "scripted";
    clerk.script.assign(10, "Finish[1. the single point]");
    AgentBackendConfig assistant;
    assistant.kind = "scripted";
    assistant.script.assign(10, "Finish[[101, 102]]");
    AgentBackendConfig judge;
    judge.kind = "scripted";
    AgentBackendConfig supervisor;
    supervisor.kind = "scripted";
    supervisor.script.assign(10, format_supervisor({false, ""}));
    AgentBackendConfig presiding;
    presiding.kind = "scripted";
    for (int i = 0; i < 10; ++i) {
        const int gold_article = 101 + i % 2;
        judge.script.push_back(format_judge({gold_article, "fits"}));
        Verdict verdict;
        verdict.articles = {correct.count(i) ? gold_article : 999};
        verdict.charges = {"charge-" + std::to_string(gold_article)};
        verdict.term.imprisonment_months = 12;
        presiding.script.push_back(format_presiding(verdict));
    }
    AgentBackendConfig meta;
    meta.kind = "scripted";
    meta.script = {format_meta({MetaAction::Kind::Add, "induced rule one"}),
                   format_meta({MetaAction::Kind::Add, "induced rule two"})};
    config.backends["clerk"] = clerk;
    config.backends["assistant"] = assistant;
    config.backends["case_judge"] = judge;
    config.backends["supervisor"] = supervisor;
    config.backends["presiding"] = presiding;
    config.backends["meta"] = meta;
    return config;
}

}  // namespace

TEST_CASE("cmd_infer accounts traces, archive growth and metrics") {
    TempDir dir("collegium_driver_infer");
    const RunConfig config = scripted_config(dir, {0, 1, 2, 3, 4, 5});
    auto world = load_world(config);
    const InferReport report = cmd_infer(config, *world);

    CHECK(report.cases == 10);
    CHECK(report.evaluated == 10);
    CHECK(report.skipped == 0);
    CHECK(report.archived == 6);
    CHECK(report.buffered == 4);
    CHECK(report.trace_files.size() == 10);
    CHECK(report.has_metrics);
    CHECK(report.metrics.article.acc == doctest::Approx(0.6));
    CHECK(fs::exists(dir.str("out/metrics.json")));
    CHECK(count_lines(dir.str("out/predictions.jsonl")) == 10);
    CHECK(fs::exists(dir.str("memory/nodes.jsonl")));

    SUBCASE("cmd_evaluate reproduces the in-run metrics") {
        const MetricsReport again =
            cmd_evaluate(config, dir.str("out/predictions.jsonl"));
        CHECK(again.article.acc == doctest::Approx(report.metrics.article.acc));
        CHECK(again.charge.macro_f1 ==
              doctest::Approx(report.metrics.charge.macro_f1));
        CHECK(again.evaluated == 10);
    }

    SUBCASE("forced evolution over the archived batch induces directives") {
        auto evolve_world = load_world(config);
        const EvolveOutcome outcome = cmd_evolve(config, *evolve_world, true);
        REQUIRE(outcome.ran);
        CHECK(outcome.report.batch_size == 6);
        CHECK(outcome.report.adds >= 1);
        CHECK(evolve_world->directives->size() >= 1);

        // A repeated forced cycle with no new nodes does nothing.
        auto again = load_world(config);
        const EvolveOutcome second = cmd_evolve(config, *again, true);
        REQUIRE(second.ran);
        CHECK(second.report.batch_size == 0);
        CHECK(second.report.adds == 0);
    }

    SUBCASE("unforced evolution below the batch threshold does not run") {
        auto evolve_world = load_world(config);
        const EvolveOutcome outcome = cmd_evolve(config, *evolve_world, false);
        CHECK_FALSE(outcome.ran);  // 6 pending < default threshold 20
    }
}

TEST_CASE("forced evolution on an empty archive reports all zeros") {
    TempDir dir("collegium_driver_empty");
    RunConfig config = scripted_config(dir, {});
    config.paths.memory_dir = dir.str("fresh_memory");
    auto world = load_world(config);
    const EvolveOutcome outcome = cmd_evolve(config, *world, true);
    REQUIRE(outcome.ran);
    CHECK(outcome.report.batch_size == 0);
    CHECK(outcome.report.adds == 0);
    CHECK(outcome.report.pairs_built == 0);
    CHECK(outcome.report.merges == 0);
    CHECK(outcome.report.pruned == 0);
}

TEST_CASE("per-case aborts are skipped and the run continues") {
    TempDir dir("collegium_driver_abort");
    RunConfig config = scripted_config(dir, {0, 1, 2, 3, 4, 5});
    // Sabotage the third clerk reply.
    config.backends["case_judge"].script[2] = "no draft here";
    auto world = load_world(config);
    const InferReport report = cmd_infer(config, *world);
    CHECK(report.skipped == 1);
    CHECK(report.evaluated == 9);
    CHECK(report.trace_files.size() == 9);
    // The aborted case still left a partial trace on disk.
    CHECK(fs::exists(dir.str("out/traces/d2.jsonl")));
}

TEST_CASE("wave concurrency is deterministic for concurrent-safe backends") {
    TempDir dir("collegium_driver_conc");
    demo::write_bundle(dir.str());
    RunConfig config = load_config(dir.str("config_nomem.json"));
    config.concurrency = 4;

    auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    auto world_a = load_world(config);
    cmd_infer(config, *world_a);
    const std::string first = slurp(config.paths.output_dir + "/predictions.jsonl");

    fs::remove_all(config.paths.output_dir);
    fs::remove_all(config.paths.memory_dir);
    auto world_b = load_world(config);
    cmd_infer(config, *world_b);
    CHECK(slurp(config.paths.output_dir + "/predictions.jsonl") == first);

    // Without memory coupling, waves match the sequential run exactly.
    RunConfig sequential = config;
    sequential.concurrency = 1;
    fs::remove_all(config.paths.output_dir);
    fs::remove_all(config.paths.memory_dir);
    auto world_c = load_world(sequential);
    cmd_infer(sequential, *world_c);
    CHECK(slurp(config.paths.output_dir + "/predictions.jsonl") == first);
}

TEST_CASE("scripted backends force sequential waves") {
    TempDir dir("collegium_driver_seq");
    RunConfig config = scripted_config(dir, {0, 1, 2, 3, 4, 5});
    config.concurrency = 8;  // ignored: pop order must stay corpus order
    auto world = load_world(config);
    const InferReport report = cmd_infer(config, *world);
    CHECK(report.skipped == 0);
    CHECK(report.archived == 6);
}

#include <doctest.h>

#include <filesystem>
#include <random>

#include "collegium/archive.hpp"
#include "collegium/errors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace collegium;
using fixtures::archive_text;
using fixtures::gold_case;
using fixtures::simple_verdict;

namespace {

std::shared_ptr<HashingEmbedder> embedder() {
    return std::make_shared<HashingEmbedder>(64);
}

}  // namespace

TEST_CASE("archive_trajectory applies the purity gate") {
    StandardsArchive archive(embedder());
    const Verdict gold = simple_verdict(114, "arson", 13);
    const CaseRecord record = gold_case("c0", "facts about a fire", gold);

    SUBCASE("fully correct trajectories are archived") {
        const ArchiveResult result = archive.archive_trajectory(record, "trace", gold);
        CHECK(result.outcome == ArchiveOutcome::Archived);
        CHECK(archive.size() == 1);
        CHECK(archive.failure_count() == 0);
        CHECK(archive.node(result.node_id).labels == label_set(gold));
    }
    SUBCASE("a wrong charge lands in the failure buffer") {
        const ArchiveResult result = archive.archive_trajectory(
            record, "trace", simple_verdict(114, "provocation", 13));
        CHECK(result.outcome == ArchiveOutcome::Buffered);
        CHECK(archive.size() == 0);
        CHECK(archive.failure_count() == 1);
    }
    SUBCASE("gold is required") {
        CaseRecord unlabeled = record;
        unlabeled.gold.reset();
        CHECK_THROWS_AS(archive.archive_trajectory(unlabeled, "trace", gold), Error);
    }
}

TEST_CASE("archiving counts match a seeded correctness pattern") {
    StandardsArchive archive(embedder());
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    int expected_archived = 0;
    for (int i = 0; i < 100; ++i) {
        const Verdict gold = simple_verdict(100 + i % 4, "charge", 10 + i % 30);
        Verdict pred = gold;
        if (coin(rng) >= 0.4) {
            pred.articles = {999};  // corrupt
        } else {
            ++expected_archived;
        }
        archive.archive_trajectory(
            gold_case("c" + std::to_string(i), "fact " + std::to_string(i), gold), "t",
            pred);
    }
    CHECK(static_cast<int>(archive.size()) == expected_archived);
    CHECK(static_cast<int>(archive.failure_count()) == 100 - expected_archived);
}

TEST_CASE("archived nodes re-verify against their source gold") {
    StandardsArchive archive(embedder());
    std::mt19937 rng(31);
    std::vector<Verdict> golds;
    for (int i = 0; i < 30; ++i) {
        const Verdict gold = oracle::random_gold(rng);
        const int id = archive_text(archive, oracle::random_text(rng), gold);
        golds.push_back(gold);
        // The trajectory text ends with the serialized verdict; reparse it.
        const std::string txt = archive.node(id).txt;
        const size_t last_line = txt.rfind('\n');
        const Verdict stored =
            verdict_from_json(nlohmann::json::parse(txt.substr(last_line + 1)));
        CHECK(verdict_matches(stored, gold).all_correct);
    }
}

TEST_CASE("edge rule: similarity and identical labels, both required") {
    StandardsArchive archive(embedder());
    const Verdict arson = simple_verdict(114, "arson");
    const Verdict riot = simple_verdict(293, "riot");

    const int a = archive_text(archive, "identical facts here", arson);
    const int b = archive_text(archive, "identical facts here", arson);
    CHECK(archive.has_edge(a, b));  // cosine 1 >= tau, same labels

    const int c = archive_text(archive, "identical facts here", riot);
    CHECK_FALSE(archive.has_edge(a, c));  // cosine 1 but labels differ
    CHECK_FALSE(archive.has_edge(b, c));
}

TEST_CASE("connect_node reports the edges it adds and is idempotent") {
    StandardsArchive archive(embedder());
    const Verdict gold = simple_verdict(114, "arson");
    const int a = archive_text(archive, "shared text", gold);
    const int b = archive_text(archive, "shared text", gold);
    CHECK(archive.has_edge(a, b));
    CHECK(archive.connect_node(a).empty());  // closure: nothing new
    CHECK(archive.connect_node(b).empty());
    CHECK_THROWS_AS(archive.connect_node(99), Error);
}

TEST_CASE("edge sets equal the brute-force rule on random graphs") {
    std::mt19937 rng(55);
    auto shared = embedder();
    for (int trial = 0; trial < 8; ++trial) {
        std::uniform_real_distribution<double> tau_dist(0.15, 0.9);
        const double tau = tau_dist(rng);
        auto archive = fixtures::make_random_archive(rng, shared, 100, tau);
        const auto nodes = archive->snapshot();

        const auto expected = oracle::edges_reference(nodes, tau);
        std::set<std::pair<int, int>> got;
        for (const auto& e : archive->edges()) got.insert(e);
        CHECK(got == expected);

        for (const StandardNode& node : nodes)  // closure
            CHECK(archive->connect_node(node.node_id).empty());
    }
}

TEST_CASE("assign_clusters: first-neighbor components") {
    auto shared = embedder();
    SUBCASE("a single node forms cluster 0") {
        StandardsArchive archive(shared);
        archive_text(archive, "alone", simple_verdict(1, "x"));
        const auto clusters = archive.assign_clusters();
        CHECK(clusters == std::map<int, int>{{0, 0}});
        CHECK(archive.node(0).cluster_id == 0);
    }
    SUBCASE("two far-apart tight pairs form two clusters") {
        StandardsArchive archive(shared);
        const Verdict gold = simple_verdict(1, "x");
        archive_text(archive, "alpha alpha alpha common words", gold);
        archive_text(archive, "alpha alpha alpha common words too", gold);
        archive_text(archive, "omega omega omega different block", gold);
        archive_text(archive, "omega omega omega different block too", gold);
        const auto clusters = archive.assign_clusters();
        CHECK(clusters.at(0) == clusters.at(1));
        CHECK(clusters.at(2) == clusters.at(3));
        CHECK(clusters.at(0) != clusters.at(2));
        CHECK(clusters.at(0) == 0);  // numbered by smallest member
        CHECK(clusters.at(2) == 1);
    }
    SUBCASE("empty archive is an error") {
        StandardsArchive archive(shared);
        CHECK_THROWS_AS(archive.assign_clusters(), Error);
    }
}

TEST_CASE("clusterings equal the reference first-neighbor components") {
    std::mt19937 rng(77);
    auto shared = embedder();
    for (int trial = 0; trial < 8; ++trial) {
        auto archive = fixtures::make_random_archive(rng, shared, 100, 0.5);
        const auto got = archive->assign_clusters();
        const auto expected = oracle::finch_reference(archive->snapshot());
        CHECK(got == expected);
    }
}

TEST_CASE("clustering is insertion-order independent as a partition") {
    auto shared = embedder();
    std::mt19937 rng(13);
    std::vector<std::string> facts;
    for (int i = 0; i < 12; ++i) facts.push_back(oracle::random_text(rng, 10));
    const Verdict gold = simple_verdict(1, "x");

    auto partition_of = [&](const std::vector<std::string>& order) {
        StandardsArchive archive(shared);
        for (const std::string& fact : order) archive_text(archive, fact, gold);
        archive.assign_clusters();
        std::map<int, std::set<std::string>> groups;
        for (const StandardNode& node : archive.snapshot())
            groups[node.cluster_id].insert(node.txt);
        std::set<std::set<std::string>> partition;
        for (auto& [id, members] : groups) partition.insert(members);
        return partition;
    };

    std::vector<std::string> reversed(facts.rbegin(), facts.rend());
    CHECK(partition_of(facts) == partition_of(reversed));
}

TEST_CASE("neighbors walks closed k-hop neighborhoods") {
    const auto chain = fixtures::make_chain_archive(3, simple_verdict(1, "x"));
    StandardsArchive& archive = *chain.archive;
    CHECK(archive.has_edge(0, 1));
    CHECK(archive.has_edge(1, 2));
    CHECK_FALSE(archive.has_edge(0, 2));

    CHECK(archive.neighbors(0, 0) == std::set<int>{0});
    CHECK(archive.neighbors(0, 1) == std::set<int>{0, 1});
    CHECK(archive.neighbors(0, 2) == std::set<int>{0, 1, 2});
    CHECK(archive.neighbors(1, 1) == std::set<int>{0, 1, 2});
    CHECK_THROWS_AS(archive.neighbors(0, -1), Error);
    CHECK_THROWS_AS(archive.neighbors(9, 1), Error);
}

TEST_CASE("an isolated node only ever reaches itself") {
    StandardsArchive archive(embedder());
    archive_text(archive, "totally alone", simple_verdict(1, "x"));
    CHECK(archive.neighbors(0, 3) == std::set<int>{0});
}

TEST_CASE("pending counter tracks archived nodes only") {
    StandardsArchive archive(embedder());
    const Verdict gold = simple_verdict(114, "arson");
    for (int i = 0; i < 5; ++i)
        archive_text(archive, "fact " + std::to_string(i), gold);
    archive.archive_trajectory(gold_case("f", "failing fact", gold), "t",
                               simple_verdict(999, "wrong"));
    CHECK(archive.pending_batch(false) == 5);  // buffered outcomes do not count
    CHECK(archive.pending_batch(true) == 5);
    CHECK(archive.pending_batch(false) == 0);
    CHECK(archive.current_batch_ids().size() == 5);

    archive_text(archive, "another", gold);
    CHECK(archive.pending_batch(false) == 1);
}

TEST_CASE("failure buffer is bounded FIFO") {
    StandardsArchive archive(embedder(), ArchiveConfig{0.85, 3});
    const Verdict gold = simple_verdict(114, "arson");
    for (int i = 0; i < 5; ++i)
        archive.archive_trajectory(
            gold_case("f" + std::to_string(i), "fact " + std::to_string(i), gold), "t",
            simple_verdict(999, "wrong"));
    CHECK(archive.failure_count() == 3);
    const auto drained = archive.drain_failures();
    REQUIRE(drained.size() == 3);
    CHECK(drained.front().case_record.id == "f2");  // f0, f1 evicted
    CHECK(archive.failure_count() == 0);
}

TEST_CASE("persistence round-trips nodes, edges, buffer and counters") {
    const std::string dir = "archive_roundtrip_dir";
    std::filesystem::remove_all(dir);
    auto shared = embedder();
    StandardsArchive archive(shared);
    std::mt19937 rng(3);
    for (int i = 0; i < 12; ++i)
        archive_text(archive, oracle::random_text(rng), oracle::random_gold(rng, 3));
    archive.archive_trajectory(
        gold_case("fail", "failing fact", simple_verdict(114, "arson")), "t",
        simple_verdict(293, "riot"));
    archive.assign_clusters();
    archive.pending_batch(true);
    archive_text(archive, "post-reset node", simple_verdict(114, "arson"));
    archive.save(dir);

    const StandardsArchive loaded = StandardsArchive::load(dir, shared);
    CHECK(loaded.size() == archive.size());
    CHECK(loaded.edges() == archive.edges());
    CHECK(loaded.failure_count() == archive.failure_count());
    CHECK(loaded.current_batch_ids() == archive.current_batch_ids());
    for (const StandardNode& node : archive.snapshot()) {
        const StandardNode other = loaded.node(node.node_id);
        CHECK(other.txt == node.txt);
        CHECK(other.vector == node.vector);
        CHECK(other.labels == node.labels);
        CHECK(other.cluster_id == node.cluster_id);
        CHECK(other.created_seq == node.created_seq);
    }
    StandardsArchive mutable_loaded = StandardsArchive::load(dir, shared);
    CHECK(mutable_loaded.pending_batch(false) == 1);
    std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <random>

#include "collegium/errors.hpp"
#include "collegium/retrieval.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace collegium;
using fixtures::archive_text;
using fixtures::simple_verdict;

TEST_CASE("iou over article sets") {
    CHECK(iou({114}, {114}) == 1.0);
    CHECK(iou({114}, {293}) == 0.0);
    CHECK(iou({114, 115}, {115, 293}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(iou({}, {}) == 0.0);
    CHECK(iou({}, {114}) == 0.0);
}

TEST_CASE("sem_sim is cosine clamped at zero") {
    RetrievalContext ctx;
    ctx.case_vector = UnitVector({1.0, 0.0, 0.0});
    CHECK(sem_sim(UnitVector({1.0, 0.0, 0.0}), ctx) == 1.0);
    CHECK(sem_sim(UnitVector({0.0, 1.0, 0.0}), ctx) == 0.0);
    CHECK(sem_sim(UnitVector({-1.0, 0.0, 0.0}), ctx) == 0.0);  // clamped
    CHECK_THROWS_AS(sem_sim(UnitVector({1.0, 0.0}), ctx), Error);
}

TEST_CASE("weighted_score arithmetic and projections") {
    const RetrievalWeights default_weights{0.4, 0.3, 0.3};
    CHECK(weighted_score(1.0, 0.5, 0.8, default_weights) ==
          doctest::Approx(0.79).epsilon(1e-12));
    CHECK(weighted_score(0.0, 0.0, 0.0, default_weights) == 0.0);
    CHECK(weighted_score(0.37, 0.9, 0.9, {1.0, 0.0, 0.0}) ==
          doctest::Approx(0.37).epsilon(1e-12));
    CHECK_THROWS_AS(weighted_score(1, 1, 1, {0, 0, 0}), Error);
    CHECK_THROWS_AS(weighted_score(1, 1, 1, {-0.1, 0.5, 0.6}), Error);
}

TEST_CASE("score stays within [0, alpha+beta+gamma] and is monotone") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const RetrievalWeights w{0.4, 0.3, 0.3};
    for (int i = 0; i < 300; ++i) {
        const double a = unit(rng), b = unit(rng), c = unit(rng);
        const double s = weighted_score(a, b, c, w);
        CHECK(s >= 0.0);
        CHECK(s <= w.alpha + w.beta + w.gamma + 1e-12);
        CHECK(weighted_score(std::min(1.0, a + 0.1), b, c, w) >= s);
        CHECK(weighted_score(a, std::min(1.0, b + 0.1), c, w) >= s);
        CHECK(weighted_score(a, b, std::min(1.0, c + 0.1), w) >= s);
    }
}

TEST_CASE("topo score on a fixed chain graph") {
    const auto chain = fixtures::make_chain_archive(6, simple_verdict(7, "x"));
    StandardsArchive& archive = *chain.archive;

    RetrievalContext ctx;
    ctx.case_vector = archive.node(0).vector;  // seed lands on node 0
    ctx.seed_k = 1;
    ctx.hops = 1;

    CHECK(activation_set(ctx, archive) == std::set<int>{0, 1});

    Directive supported_by_one;
    supported_by_one.supporting = {1};
    supported_by_one.vector = ctx.case_vector;
    CHECK(topo_score_directive(supported_by_one, ctx, archive) == 0.5);
    CHECK(topo_score_directive(supported_by_one, ctx, archive, false) == 1.0);  // raw

    Directive supported_by_all;
    supported_by_all.supporting = {0, 1};
    supported_by_all.vector = ctx.case_vector;
    CHECK(topo_score_directive(supported_by_all, ctx, archive) == 1.0);

    // Node 1 counts itself plus its neighbors 0 and 2... of the activated
    // {0,1}, both are node 1 itself or adjacent to it.
    CHECK(topo_score_node(1, ctx, archive) == 1.0);
    CHECK(topo_score_node(3, ctx, archive) == 0.0);
}

TEST_CASE("topo score is zero on an empty graph") {
    auto shared = std::make_shared<HashingEmbedder>(32);
    StandardsArchive archive(shared);
    RetrievalContext ctx;
    ctx.case_vector = shared->embed("query");
    Directive d;
    d.supporting = {1, 2, 3};
    d.vector = ctx.case_vector;
    CHECK(topo_score_directive(d, ctx, archive) == 0.0);
}

TEST_CASE("retrieve_standards ranks by the weighted score") {
    auto shared = std::make_shared<HashingEmbedder>(64);
    StandardsArchive archive(shared);
    RetrievalContext ctx;
    ctx.case_vector = shared->embed("query text");

    SUBCASE("empty archive yields nothing") {
        CHECK(retrieve_standards(ctx, archive, 3).empty());
    }
    SUBCASE("an archived duplicate of the query ranks first on semantics") {
        std::mt19937 rng(8);
        const CaseRecord query_case =
            fixtures::gold_case("q", "the exact disputed facts", simple_verdict(1, "x"));
        for (int i = 0; i < 10; ++i)
            archive_text(archive, oracle::random_text(rng), oracle::random_gold(rng));
        const int dup = archive.archive_trajectory(query_case, "trace",
                                                   *query_case.gold)
                            .node_id;
        ctx.case_vector = archive.node(dup).vector;
        RetrievalOptions options;
        options.weights = {0.0, 0.0, 1.0};
        const auto top = retrieve_standards(ctx, archive, 3, options);
        REQUIRE_FALSE(top.empty());
        CHECK(top.front().node_id == dup);
        CHECK(top.front().sem_term == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("retrieve_directives: exact anchor dominates under (1,0,0)") {
    auto shared = std::make_shared<HashingEmbedder>(64);
    StandardsArchive archive(shared);
    DirectiveBase base(shared);
    RetrievalContext ctx;
    ctx.case_vector = shared->embed("query");
    ctx.candidate_articles = {114, 115};

    SUBCASE("empty base yields nothing") {
        CHECK(retrieve_directives(ctx, base, archive, 3).empty());
    }
    SUBCASE("anchored exactly on the candidates ranks first") {
        base.add_directive("partial overlap", {114, 293});
        const int exact = base.add_directive("exact anchor", {114, 115});
        base.add_directive("disjoint", {601});
        RetrievalOptions options;
        options.weights = {1.0, 0.0, 0.0};
        const auto top = retrieve_directives(ctx, base, archive, 3, options);
        REQUIRE_FALSE(top.empty());
        CHECK(top.front().directive_id == exact);
        CHECK(top.front().iou_term == 1.0);
    }
}

TEST_CASE("engine retrieval equals the brute-force oracle") {
    std::mt19937 rng(2024);
    auto shared = std::make_shared<HashingEmbedder>(32);
    for (int trial = 0; trial < 20; ++trial) {
        auto archive = fixtures::make_random_archive(rng, shared, 50, 0.35);
        DirectiveBase base(shared);
        std::uniform_int_distribution<int> directive_count(0, 30);
        std::uniform_int_distribution<int> article(101, 106);
        std::uniform_int_distribution<int> node_pick(0, archive->size() - 1);
        const int directives = directive_count(rng);
        for (int i = 0; i < directives; ++i) {
            std::set<int> supporting;
            for (int s = 0; s < 3; ++s) supporting.insert(node_pick(rng));
            base.add_directive(oracle::random_text(rng, 6), {article(rng)}, supporting);
        }

        RetrievalContext ctx;
        ctx.case_vector = shared->embed(oracle::random_text(rng, 9));
        ctx.candidate_articles = {article(rng), article(rng)};
        ctx.seed_k = 5;
        ctx.hops = 2;

        std::set<std::pair<int, int>> edges;
        for (const auto& e : archive->edges()) edges.insert(e);

        const RetrievalWeights w{0.4, 0.3, 0.3};
        const auto expected_std = oracle::retrieve_standards_reference(
            archive->snapshot(), edges, ctx, w, 3);
        const auto got_std = retrieve_standards(ctx, *archive, 3);
        REQUIRE(got_std.size() == expected_std.size());
        for (size_t i = 0; i < got_std.size(); ++i) {
            CHECK(got_std[i].node_id == expected_std[i].id);
            CHECK(got_std[i].score ==
                  doctest::Approx(expected_std[i].score).epsilon(1e-9));
        }

        const auto expected_dir = oracle::retrieve_directives_reference(
            base.snapshot(), archive->snapshot(), edges, ctx, w, 3);
        const auto got_dir = retrieve_directives(ctx, base, *archive, 3);
        REQUIRE(got_dir.size() == expected_dir.size());
        for (size_t i = 0; i < got_dir.size(); ++i) {
            CHECK(got_dir[i].directive_id == expected_dir[i].id);
            CHECK(got_dir[i].score ==
                  doctest::Approx(expected_dir[i].score).epsilon(1e-9));
        }
    }
}

TEST_CASE("uniform weight scaling preserves the retrieved ranking") {
    std::mt19937 rng(31);
    auto shared = std::make_shared<HashingEmbedder>(32);
    auto archive = fixtures::make_random_archive(rng, shared, 40, 0.35);
    RetrievalContext ctx;
    ctx.case_vector = shared->embed(oracle::random_text(rng));
    ctx.candidate_articles = {101, 102};

    RetrievalOptions base_options;
    RetrievalOptions scaled;
    scaled.weights = {0.4 * 7, 0.3 * 7, 0.3 * 7};
    const auto a = retrieve_standards(ctx, *archive, 5, base_options);
    const auto b = retrieve_standards(ctx, *archive, 5, scaled);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].node_id == b[i].node_id);
}

// Shared archive constructions for graph-shape tests.
#pragma once

#include <doctest.h>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "collegium/archive.hpp"
#include "collegium/domain.hpp"
#include "collegium/embedding.hpp"
#include "support/oracles.hpp"

namespace fixtures {

using namespace collegium;

inline CaseRecord gold_case(const std::string& id, const std::string& fact,
                            const Verdict& gold) {
    CaseRecord record;
    record.id = id;
    record.fact_text = fact;
    record.gold = gold;
    return record;
}

inline Verdict simple_verdict(int article, const std::string& charge, int months = 12) {
    Verdict v;
    v.articles = {article};
    v.charges = {charge};
    v.term.imprisonment_months = months;
    return v;
}

// Archives a fully-correct trajectory built from the given fact text.
inline int archive_text(StandardsArchive& archive, const std::string& fact,
                        const Verdict& gold, const std::string& trace = "trace") {
    const ArchiveResult result = archive.archive_trajectory(
        gold_case("case-" + std::to_string(archive.size()), fact, gold), trace, gold);
    REQUIRE(result.outcome == ArchiveOutcome::Archived);
    return result.node_id;
}

// A path graph p0-p1-...-p(n-1): consecutive texts share one word block, so
// adjacent cosine clears tau while non-adjacent stays below it. tau is fitted
// to the realized similarities, then asserted to separate the two groups.
struct ChainArchive {
    std::shared_ptr<HashingEmbedder> embedder;
    std::unique_ptr<StandardsArchive> archive;
};

inline ChainArchive make_chain_archive(int n, const Verdict& gold) {
    auto embedder = std::make_shared<HashingEmbedder>(128);
    std::mt19937 rng(17);
    // Gibberish word blocks with disjoint vocabularies: cross-block trigram
    // collisions stay negligible.
    std::uniform_int_distribution<int> letter('a', 'z');
    auto gibberish_block = [&](int words) {
        std::string out;
        for (int w = 0; w < words; ++w) {
            if (w) out += " ";
            for (int k = 0; k < 9; ++k) out += static_cast<char>(letter(rng));
        }
        return out;
    };
    std::vector<std::string> blocks;
    for (int i = 0; i <= n; ++i) blocks.push_back(gibberish_block(24));
    std::vector<std::string> facts;
    for (int i = 0; i < n; ++i) facts.push_back(blocks[i] + " " + blocks[i + 1]);

    // Trajectory text is fact + trace + verdict; measure similarity over the
    // exact texts the archive will embed.
    std::vector<UnitVector> vectors;
    for (int i = 0; i < n; ++i) {
        const CaseRecord record = gold_case("probe", facts[i], gold);
        vectors.push_back(embedder->embed(trajectory_text(record, "trace", gold)));
    }
    double min_adjacent = 1.0;
    double max_rest = -1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double sim = cosine(vectors[i], vectors[j]);
            if (j == i + 1)
                min_adjacent = std::min(min_adjacent, sim);
            else
                max_rest = std::max(max_rest, sim);
        }
    REQUIRE(max_rest < min_adjacent);  // construction produced a clean chain
    ArchiveConfig config;
    config.tau = (max_rest + min_adjacent) / 2.0;
    REQUIRE(config.tau > 0.0);
    REQUIRE(config.tau < 1.0);

    ChainArchive out;
    out.embedder = embedder;
    out.archive = std::make_unique<StandardsArchive>(embedder, config);
    for (int i = 0; i < n; ++i) archive_text(*out.archive, facts[i], gold);
    return out;
}

// Random archive (every trajectory fully correct) plus the label pool used.
inline std::unique_ptr<StandardsArchive> make_random_archive(
    std::mt19937& rng, std::shared_ptr<const EmbeddingProvider> embedder, int max_nodes,
    double tau, int article_pool = 4) {
    auto archive = std::make_unique<StandardsArchive>(embedder, ArchiveConfig{tau, 10000});
    std::uniform_int_distribution<int> count(1, max_nodes);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const Verdict gold = oracle::random_gold(rng, article_pool);
        archive_text(*archive, oracle::random_text(rng, 10), gold,
                     oracle::random_text(rng, 4));
    }
    return archive;
}

}  // namespace fixtures

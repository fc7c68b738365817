// Independent brute-force oracles for property tests. Everything here is
// written against the contracts, not the engine code paths it checks.
#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "collegium/archive.hpp"
#include "collegium/directives.hpp"
#include "collegium/domain.hpp"
#include "collegium/embedding.hpp"
#include "collegium/retrieval.hpp"

namespace oracle {

using namespace collegium;

// Decision table transcribed independently of TermBinning.
inline int bin_term_reference(const TermOfImprisonment& t) {
    if (t.death_penalty) return 0;
    if (t.life_imprisonment) return 1;
    const int m = t.imprisonment_months;
    if (m == 0) return 10;
    if (m > 120) return 2;
    if (m > 84) return 3;
    if (m > 60) return 4;
    if (m > 36) return 5;
    if (m > 24) return 6;
    if (m > 12) return 7;
    if (m > 6) return 8;
    return 9;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Pairwise application of the edge rule.
inline std::set<std::pair<int, int>> edges_reference(
    const std::vector<StandardNode>& nodes, double tau) {
    std::set<std::pair<int, int>> edges;
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j) {
            if (!(nodes[i].labels == nodes[j].labels)) continue;
            if (dot(nodes[i].vector.values(), nodes[j].vector.values()) < tau) continue;
            edges.insert({static_cast<int>(i), static_cast<int>(j)});
        }
    return edges;
}

// First-neighbor clustering via explicit adjacency and BFS components,
// numbered by smallest member node id.
inline std::map<int, int> finch_reference(const std::vector<StandardNode>& nodes) {
    const size_t n = nodes.size();
    std::vector<int> first(n);
    for (size_t i = 0; i < n; ++i) {
        int best = static_cast<int>(i);
        double best_sim = -2.0;
        for (size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double sim = dot(nodes[i].vector.values(), nodes[j].vector.values());
            if (sim > best_sim) {
                best_sim = sim;
                best = static_cast<int>(j);
            }
        }
        first[i] = best;
    }
    std::vector<std::set<int>> adj(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool linked = first[i] == static_cast<int>(j) ||
                                first[j] == static_cast<int>(i) || first[i] == first[j];
            if (linked) {
                adj[i].insert(static_cast<int>(j));
                adj[j].insert(static_cast<int>(i));
            }
        }
    std::map<int, int> assignment;
    std::vector<bool> seen(n, false);
    int next_cluster = 0;
    for (size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<int> component;
        std::queue<int> frontier;
        frontier.push(static_cast<int>(i));
        seen[i] = true;
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            component.push_back(u);
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = true;
                    frontier.push(v);
                }
        }
        for (int member : component) assignment[member] = next_cluster;
        ++next_cluster;
    }
    return assignment;
}

// Closed k-hop neighborhood by plain BFS over an explicit edge list.
inline std::set<int> neighbors_reference(const std::set<std::pair<int, int>>& edges,
                                         int start, int hops) {
    std::map<int, std::set<int>> adj;
    for (const auto& [a, b] : edges) {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    std::set<int> seen{start};
    std::vector<int> frontier{start};
    for (int depth = 0; depth < hops; ++depth) {
        std::vector<int> next;
        for (int u : frontier)
            for (int v : adj[u])
                if (seen.insert(v).second) next.push_back(v);
        frontier = std::move(next);
    }
    return seen;
}

// Full retrieval scoring pipeline recomputed from scratch.
struct ScoredItem {
    int id;
    double score;
};

inline std::set<int> activation_reference(const std::vector<StandardNode>& nodes,
                                          const std::set<std::pair<int, int>>& edges,
                                          const UnitVector& query, int seed_k, int hops) {
    std::vector<std::pair<double, int>> sims;
    for (const StandardNode& node : nodes)
        sims.push_back({dot(query.values(), node.vector.values()), node.node_id});
    std::sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::set<int> activated;
    for (int i = 0; i < seed_k && i < static_cast<int>(sims.size()); ++i) {
        const std::set<int> reach = neighbors_reference(edges, sims[i].second, hops);
        activated.insert(reach.begin(), reach.end());
    }
    return activated;
}

inline std::vector<ScoredItem> retrieve_standards_reference(
    const std::vector<StandardNode>& nodes, const std::set<std::pair<int, int>>& edges,
    const RetrievalContext& ctx, const RetrievalWeights& weights, size_t n) {
    const std::set<int> activated =
        activation_reference(nodes, edges, ctx.case_vector, ctx.seed_k, ctx.hops);
    auto adjacent = [&edges](int a, int b) {
        return edges.count({std::min(a, b), std::max(a, b)}) > 0;
    };
    std::vector<ScoredItem> scored;
    for (const StandardNode& node : nodes) {
        size_t inter = 0;
        for (int a : node.labels.articles) inter += ctx.candidate_articles.count(a);
        const size_t uni =
            node.labels.articles.size() + ctx.candidate_articles.size() - inter;
        const double iou_term = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
        size_t raw = 0;
        for (int v : activated)
            if (v == node.node_id || adjacent(v, node.node_id)) ++raw;
        const double topo_term =
            static_cast<double>(raw) / std::max<size_t>(1, activated.size());
        const double sem_term =
            std::max(0.0, dot(node.vector.values(), ctx.case_vector.values()));
        scored.push_back({node.node_id, weights.alpha * iou_term +
                                            weights.beta * topo_term +
                                            weights.gamma * sem_term});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredItem& a, const ScoredItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (scored.size() > n) scored.resize(n);
    return scored;
}

inline std::vector<ScoredItem> retrieve_directives_reference(
    const std::vector<Directive>& directives, const std::vector<StandardNode>& nodes,
    const std::set<std::pair<int, int>>& edges, const RetrievalContext& ctx,
    const RetrievalWeights& weights, size_t n) {
    const bool graph_empty = nodes.empty();
    const std::set<int> activated =
        graph_empty ? std::set<int>{}
                    : activation_reference(nodes, edges, ctx.case_vector, ctx.seed_k,
                                           ctx.hops);
    std::vector<ScoredItem> scored;
    for (const Directive& d : directives) {
        size_t inter = 0;
        for (int a : d.anchor_articles) inter += ctx.candidate_articles.count(a);
        const size_t uni =
            d.anchor_articles.size() + ctx.candidate_articles.size() - inter;
        const double iou_term = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
        size_t raw = 0;
        for (int v : activated) raw += d.supporting.count(v);
        const double topo_term =
            graph_empty
                ? 0.0
                : static_cast<double>(raw) / std::max<size_t>(1, activated.size());
        const double sem_term =
            std::max(0.0, dot(d.vector.values(), ctx.case_vector.values()));
        scored.push_back({d.directive_id, weights.alpha * iou_term +
                                              weights.beta * topo_term +
                                              weights.gamma * sem_term});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredItem& a, const ScoredItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (scored.size() > n) scored.resize(n);
    return scored;
}

// Per-class confusion-matrix metrics computed the long way.
template <typename Label>
struct ReferenceMetrics {
    double acc, macro_p, macro_r, macro_f1;
};

template <typename Label>
ReferenceMetrics<Label> metrics_reference(const std::vector<Label>& gold,
                                          const std::vector<Label>& pred) {
    std::set<Label> classes(gold.begin(), gold.end());
    long correct = 0;
    double sum_p = 0, sum_r = 0, sum_f = 0;
    for (size_t i = 0; i < gold.size(); ++i)
        if (gold[i] == pred[i]) ++correct;
    for (const Label& c : classes) {
        long tp = 0, fp = 0, fn = 0;
        for (size_t i = 0; i < gold.size(); ++i) {
            const bool g = gold[i] == c;
            const bool p = pred[i] == c;
            if (g && p) ++tp;
            if (!g && p) ++fp;
            if (g && !p) ++fn;
        }
        const double prec = tp + fp ? double(tp) / (tp + fp) : 0.0;
        const double rec = tp + fn ? double(tp) / (tp + fn) : 0.0;
        const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        sum_p += prec;
        sum_r += rec;
        sum_f += f1;
    }
    const double k = double(classes.size());
    return {double(correct) / gold.size(), sum_p / k, sum_r / k, sum_f / k};
}

// Deterministic pseudo-random word soup; distinct seeds give near-orthogonal
// hash embeddings.
inline std::string random_text(std::mt19937& rng, int words = 12) {
    static const char* kWords[] = {
        "ledger",  "harbor", "signal",  "permit",  "intent",  "damage", "vehicle",
        "witness", "records", "dispute", "channel", "station", "market", "charter",
        "notice",  "injury", "device",  "escort",  "tunnel",  "branch", "filing",
        "motive",  "seizure", "verdict", "custody", "pattern", "outage", "barrier"};
    std::uniform_int_distribution<int> pick(0, 27);
    std::string out;
    for (int i = 0; i < words; ++i) {
        if (i) out += " ";
        out += kWords[pick(rng)];
    }
    return out;
}

inline Verdict random_gold(std::mt19937& rng, int article_pool = 6) {
    std::uniform_int_distribution<int> art(1, article_pool);
    std::uniform_int_distribution<int> months(0, 150);
    Verdict v;
    const int a = art(rng);
    v.articles = {100 + a};
    v.charges = {"charge-" + std::to_string(a)};
    v.term.imprisonment_months = months(rng);
    return v;
}

}  // namespace oracle

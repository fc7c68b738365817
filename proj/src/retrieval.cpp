#include "collegium/retrieval.hpp"

#include <algorithm>

#include "collegium/errors.hpp"

namespace collegium {

double iou(const std::set<int>& item_labels, const std::set<int>& candidates) {
    if (item_labels.empty() && candidates.empty()) return 0.0;
    size_t inter = 0;
    for (int a : item_labels) inter += candidates.count(a);
    const size_t uni = item_labels.size() + candidates.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::set<int> activation_set(const RetrievalContext& ctx,
                             const StandardsArchive& archive) {
    if (ctx.seed_k < 1) throw Error(ErrorKind::Validation, "seed_k must be >= 1");
    if (ctx.hops < 0) throw Error(ErrorKind::Validation, "hops must be >= 0");
    std::set<int> activated;
    for (int seed : archive.nearest_nodes(ctx.case_vector, ctx.seed_k)) {
        const std::set<int> reach = archive.neighbors(seed, ctx.hops);
        activated.insert(reach.begin(), reach.end());
    }
    return activated;
}

namespace {

double normalize_count(size_t raw, size_t activated, bool normalize) {
    if (!normalize) return static_cast<double>(raw);
    return static_cast<double>(raw) /
           static_cast<double>(std::max<size_t>(1, activated));
}

}  // namespace

double topo_score_node(int node_id, const RetrievalContext& ctx,
                       const StandardsArchive& archive, bool normalize) {
    if (archive.size() == 0) return 0.0;
    const std::set<int> activated = activation_set(ctx, archive);
    size_t raw = 0;
    for (int v : activated)
        if (v == node_id || archive.has_edge(v, node_id)) ++raw;
    return normalize_count(raw, activated.size(), normalize);
}

double topo_score_directive(const Directive& directive, const RetrievalContext& ctx,
                            const StandardsArchive& archive, bool normalize) {
    if (archive.size() == 0) return 0.0;
    const std::set<int> activated = activation_set(ctx, archive);
    size_t raw = 0;
    for (int v : activated) raw += directive.supporting.count(v);
    return normalize_count(raw, activated.size(), normalize);
}

double sem_sim(const UnitVector& item_vector, const RetrievalContext& ctx) {
    return std::max(0.0, cosine(item_vector, ctx.case_vector));
}

double weighted_score(double iou_term, double topo_term, double sem_term,
                      const RetrievalWeights& weights) {
    if (weights.alpha < 0 || weights.beta < 0 || weights.gamma < 0 ||
        weights.alpha + weights.beta + weights.gamma <= 0)
        throw Error(ErrorKind::Config, "retrieval weights must be non-negative, sum > 0");
    return weights.alpha * iou_term + weights.beta * topo_term + weights.gamma * sem_term;
}

std::vector<ScoredStandard> retrieve_standards(const RetrievalContext& ctx,
                                               const StandardsArchive& archive, size_t n,
                                               const RetrievalOptions& options) {
    if (n < 1) throw Error(ErrorKind::Validation, "retrieve needs n >= 1");
    std::vector<ScoredStandard> scored;
    if (archive.size() == 0) return scored;
    const std::set<int> activated = activation_set(ctx, archive);
    for (const StandardNode& node : archive.snapshot()) {
        ScoredStandard s;
        s.node_id = node.node_id;
        s.iou_term = iou(node.labels.articles, ctx.candidate_articles);
        size_t raw = 0;
        for (int v : activated)
            if (v == node.node_id || archive.has_edge(v, node.node_id)) ++raw;
        s.topo_term = normalize_count(raw, activated.size(), options.normalize_topo);
        s.sem_term = sem_sim(node.vector, ctx);
        s.score = weighted_score(s.iou_term, s.topo_term, s.sem_term, options.weights);
        scored.push_back(s);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.node_id < b.node_id;
    });
    if (scored.size() > n) scored.resize(n);
    return scored;
}

std::vector<ScoredDirective> retrieve_directives(const RetrievalContext& ctx,
                                                 const DirectiveBase& base,
                                                 const StandardsArchive& archive, size_t n,
                                                 const RetrievalOptions& options) {
    if (n < 1) throw Error(ErrorKind::Validation, "retrieve needs n >= 1");
    std::vector<ScoredDirective> scored;
    if (base.size() == 0) return scored;
    const bool graph_empty = archive.size() == 0;
    const std::set<int> activated =
        graph_empty ? std::set<int>{} : activation_set(ctx, archive);
    for (const Directive& d : base.snapshot()) {
        ScoredDirective s;
        s.directive_id = d.directive_id;
        s.iou_term = iou(d.anchor_articles, ctx.candidate_articles);
        size_t raw = 0;
        for (int v : activated) raw += d.supporting.count(v);
        s.topo_term =
            graph_empty ? 0.0 : normalize_count(raw, activated.size(), options.normalize_topo);
        s.sem_term = sem_sim(d.vector, ctx);
        s.score = weighted_score(s.iou_term, s.topo_term, s.sem_term, options.weights);
        scored.push_back(s);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.directive_id < b.directive_id;
    });
    if (scored.size() > n) scored.resize(n);
    return scored;
}

}  // namespace collegium

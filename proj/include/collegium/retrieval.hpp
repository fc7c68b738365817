#pragma once

#include <set>
#include <vector>

#include "collegium/archive.hpp"
#include "collegium/directives.hpp"
#include "collegium/embedding.hpp"

namespace collegium {

struct RetrievalWeights {
    double alpha = 0.4;  // statute-anchor IoU
    double beta = 0.3;   // topological co-activation
    double gamma = 0.3;  // semantic similarity

    bool operator==(const RetrievalWeights&) const = default;
};

struct RetrievalContext {
    UnitVector case_vector;
    std::set<int> candidate_articles;  // S_statute; may be empty (IoU -> 0)
    int seed_k = 5;
    int hops = 2;
};

struct RetrievalOptions {
    RetrievalWeights weights;
    // When false the topo term is the raw co-activation count instead of the
    // activation-set-normalized frequency.
    bool normalize_topo = true;

    bool operator==(const RetrievalOptions&) const = default;
};

// Intersection-over-union of two article-id sets; 0 when both are empty.
double iou(const std::set<int>& item_labels, const std::set<int>& candidates);

// Seed activation followed by k-hop diffusion: top seed_k archive nodes by
// cosine to the case vector, expanded through closed neighborhoods.
std::set<int> activation_set(const RetrievalContext& ctx, const StandardsArchive& archive);

// Co-activation of a standard node: counts activated nodes equal to it or
// adjacent to it, normalized by the activation set size (unless raw).
double topo_score_node(int node_id, const RetrievalContext& ctx,
                       const StandardsArchive& archive, bool normalize = true);

// Co-activation of a directive: counts activated nodes in its supporting set.
double topo_score_directive(const Directive& directive, const RetrievalContext& ctx,
                            const StandardsArchive& archive, bool normalize = true);

// Cosine clamped at zero so the weighted sum stays in [0, alpha+beta+gamma].
double sem_sim(const UnitVector& item_vector, const RetrievalContext& ctx);

double weighted_score(double iou_term, double topo_term, double sem_term,
                      const RetrievalWeights& weights);

struct ScoredStandard {
    int node_id = -1;
    double score = 0.0;
    double iou_term = 0.0;
    double topo_term = 0.0;
    double sem_term = 0.0;
};

struct ScoredDirective {
    int directive_id = -1;
    double score = 0.0;
    double iou_term = 0.0;
    double topo_term = 0.0;
    double sem_term = 0.0;
};

// Top-n by score, descending; ties broken by ascending id.
std::vector<ScoredStandard> retrieve_standards(const RetrievalContext& ctx,
                                               const StandardsArchive& archive, size_t n,
                                               const RetrievalOptions& options = {});

std::vector<ScoredDirective> retrieve_directives(const RetrievalContext& ctx,
                                                 const DirectiveBase& base,
                                                 const StandardsArchive& archive, size_t n,
                                                 const RetrievalOptions& options = {});

}  // namespace collegium

#include "collegium/evolution.hpp"

#include <algorithm>
#include <map>

#include "collegium/errors.hpp"
#include "collegium/protocol.hpp"
#include "collegium/retrieval.hpp"

namespace collegium {

nlohmann::json CycleReport::to_json() const {
    return {{"cycle_index", cycle_index},
            {"batch_size", batch_size},
            {"adds", adds},
            {"fallback_adds", fallback_adds},
            {"refines", refines},
            {"keeps", keeps},
            {"prune_votes", prune_votes},
            {"pruned", pruned},
            {"merges", merges},
            {"pairs_built", pairs_built},
            {"pairs_skipped", pairs_skipped},
            {"meta_failures", meta_failures},
            {"consolidation_ran", consolidation_ran}};
}

bool EvolutionEngine::maybe_trigger(StandardsArchive& archive) const {
    if (archive.pending_batch(false) < config_.batch_threshold) return false;
    archive.pending_batch(true);
    return true;
}

void EvolutionEngine::force_trigger(StandardsArchive& archive) const {
    archive.pending_batch(true);
}

namespace {

std::string join_articles(const std::set<int>& articles) {
    std::string out;
    for (int a : articles) {
        if (!out.empty()) out += ", ";
        out += std::to_string(a);
    }
    return out;
}

std::string numbered(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += "\n";
        out += std::to_string(i + 1) + ". " + items[i];
    }
    return out;
}

std::optional<MetaAction> ask_meta(AgentBackend& meta, const PromptLibrary& prompts,
                                   TemplateId id,
                                   const std::map<std::string, std::string>& vars,
                                   CycleReport* report) {
    try {
        const PromptBundle bundle = prompts.assemble(id, vars);
        return parse_meta(invoke(meta, bundle));
    } catch (const Error&) {
        if (report) ++report->meta_failures;
        return std::nullopt;
    }
}

// Exact-anchor directive lookup: highest confidence; the ascending-id scan
// makes ties resolve to the lowest id.
std::optional<int> top_directive_for_anchor(const DirectiveBase& base,
                                            const std::set<int>& anchor) {
    std::optional<int> best;
    double best_conf = -1.0;
    for (const Directive& d : base.snapshot()) {
        if (d.anchor_articles != anchor) continue;
        if (d.confidence > best_conf) {
            best = d.directive_id;
            best_conf = d.confidence;
        }
    }
    return best;
}

}  // namespace

std::vector<int> EvolutionEngine::phase_a_induce(StandardsArchive& archive,
                                                 DirectiveBase& base, AgentBackend& meta,
                                                 const std::vector<int>& batch,
                                                 CycleReport* report) {
    // Group the new nodes by cluster, then split by exact label set.
    std::map<std::pair<int, LabelSet>, std::vector<int>> groups;
    for (int id : batch) {
        const StandardNode node = archive.node(id);
        groups[{node.cluster_id, node.labels}].push_back(id);
    }

    std::vector<int> added;
    for (const auto& [key, members] : groups) {
        if (static_cast<int>(members.size()) < config_.min_cluster_size) continue;
        const LabelSet& labels = key.second;
        std::vector<std::string> texts;
        texts.reserve(members.size());
        for (int id : members) texts.push_back(archive.node(id).txt);
        const auto action =
            ask_meta(meta, *prompts_, TemplateId::MetaInduce,
                     {{"ANCHOR_ARTICLES", join_articles(labels.articles)},
                      {"MEMBER_TRAJECTORIES", numbered(texts)}},
                     report);
        if (!action || action->kind != MetaAction::Kind::Add) continue;
        const std::set<int> supporting(members.begin(), members.end());
        added.push_back(base.add_directive(action->text, labels.articles, supporting));
        if (report) ++report->adds;
    }
    return added;
}

std::vector<ContrastivePair> EvolutionEngine::build_contrastive_pairs(
    const StandardsArchive& archive, std::vector<FailureEntry> failures,
    CycleReport* report) const {
    std::vector<ContrastivePair> pairs;
    const std::vector<StandardNode> nodes = archive.snapshot();
    for (FailureEntry& failure : failures) {
        const LabelSet gold_labels = label_set(failure.gold);
        const UnitVector query = embedder_->embed(failure.case_record.fact_text);
        int best = -1;
        double best_sim = -2.0;
        for (const StandardNode& node : nodes) {
            if (!(node.labels == gold_labels)) continue;
            const double sim = cosine(query, node.vector);
            if (sim > best_sim) {
                best_sim = sim;
                best = node.node_id;
            }
        }
        if (best < 0) {
            if (report) ++report->pairs_skipped;
            continue;
        }
        pairs.push_back({best, std::move(failure)});
        if (report) ++report->pairs_built;
    }
    return pairs;
}

void EvolutionEngine::phase_b_refine(const std::vector<ContrastivePair>& pairs,
                                     const StandardsArchive& archive,
                                     DirectiveBase& base, AgentBackend& meta,
                                     CycleReport* report) {
    for (const ContrastivePair& pair : pairs) {
        const StandardNode positive = archive.node(pair.positive_node_id);
        const std::set<int>& anchor = positive.labels.articles;
        const std::string negative_text = trajectory_text(
            pair.negative.case_record, pair.negative.trace, pair.negative.predicted);

        const auto directive_id = top_directive_for_anchor(base, anchor);
        if (!directive_id) {
            // No directive covers this law yet; induce one from the pair.
            const auto action =
                ask_meta(meta, *prompts_, TemplateId::MetaInduce,
                         {{"ANCHOR_ARTICLES", join_articles(anchor)},
                          {"MEMBER_TRAJECTORIES", numbered({positive.txt})}},
                         report);
            if (action && action->kind == MetaAction::Kind::Add) {
                base.add_directive(action->text, anchor, {positive.node_id});
                if (report) ++report->fallback_adds;
            }
            continue;
        }

        const auto action =
            ask_meta(meta, *prompts_, TemplateId::MetaDiff,
                     {{"DIRECTIVE_TEXT", base.directive(*directive_id).text},
                      {"POSITIVE_TRAJECTORY", positive.txt},
                      {"NEGATIVE_TRAJECTORY", negative_text}},
                     report);
        if (!action) continue;
        switch (action->kind) {
        case MetaAction::Kind::Refine:
            base.refine_directive(*directive_id, action->text, {positive.node_id}, {});
            if (report) ++report->refines;
            break;
        case MetaAction::Kind::Prune:
            base.record_outcome(*directive_id, DirectiveOutcome::Contradicted);
            if (report) ++report->prune_votes;
            break;
        case MetaAction::Kind::Keep:
        case MetaAction::Kind::Add:
            base.record_outcome(*directive_id, DirectiveOutcome::Supported);
            if (report) ++report->keeps;
            break;
        }
    }
}

void EvolutionEngine::phase_c_consolidate(DirectiveBase& base, AgentBackend& meta,
                                          CycleReport* report) {
    // Group by exact anchor, then single-linkage clusters over pairwise
    // cosine >= the merge threshold.
    std::map<std::set<int>, std::vector<Directive>> by_anchor;
    for (const Directive& d : base.snapshot()) by_anchor[d.anchor_articles].push_back(d);

    for (const auto& [anchor, members] : by_anchor) {
        if (members.size() < 2) continue;
        const size_t n = members.size();
        std::vector<int> parent(n);
        for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
        auto find = [&](int x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                if (cosine(members[i].vector, members[j].vector) >=
                    config_.similarity_merge_threshold) {
                    const int a = find(static_cast<int>(i));
                    const int b = find(static_cast<int>(j));
                    if (a != b) parent[std::max(a, b)] = std::min(a, b);
                }
        std::map<int, std::vector<size_t>> clusters;
        for (size_t i = 0; i < n; ++i) clusters[find(static_cast<int>(i))].push_back(i);

        for (const auto& [root, indices] : clusters) {
            if (indices.size() < 2) continue;
            std::vector<std::string> texts;
            std::vector<int> group_ids;
            for (size_t idx : indices) {
                texts.push_back(members[idx].text);
                group_ids.push_back(members[idx].directive_id);
            }
            const auto action = ask_meta(meta, *prompts_, TemplateId::MetaMerge,
                                         {{"ANCHOR_ARTICLES", join_articles(anchor)},
                                          {"MEMBER_DIRECTIVES", numbered(texts)}},
                                         report);
            if (!action || action->kind != MetaAction::Kind::Add) continue;
            base.consolidate(group_ids, action->text);
            if (report) ++report->merges;
        }
    }
}

CycleReport EvolutionEngine::run_cycle(StandardsArchive& archive, DirectiveBase& base,
                                       AgentBackend& meta) {
    CycleReport report;
    report.cycle_index = static_cast<int>(++cycles_run_);

    const std::vector<int> batch = archive.current_batch_ids();
    report.batch_size = static_cast<int>(batch.size());
    if (archive.size() > 0) archive.assign_clusters();

    phase_a_induce(archive, base, meta, batch, &report);

    std::vector<FailureEntry> failures = archive.drain_failures();
    const std::vector<ContrastivePair> pairs =
        build_contrastive_pairs(archive, std::move(failures), &report);
    phase_b_refine(pairs, archive, base, meta, &report);

    if (config_.consolidation_period > 0 &&
        cycles_run_ % config_.consolidation_period == 0) {
        report.consolidation_ran = true;
        phase_c_consolidate(base, meta, &report);
    }
    report.pruned = static_cast<int>(base.prune().size());
    return report;
}

}  // namespace collegium

#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "collegium/domain.hpp"
#include "collegium/embedding.hpp"

namespace collegium {

// One archived adjudication trajectory. Immutable once inserted, except for
// the cluster id which is rewritten by assign_clusters().
struct StandardNode {
    int node_id = -1;
    std::string txt;  // fact + reasoning trace + serialized verdict
    UnitVector vector;
    LabelSet labels;
    int cluster_id = -1;
    long created_seq = -1;
};

struct FailureEntry {
    CaseRecord case_record;
    std::string trace;
    Verdict predicted;
    Verdict gold;
};

enum class ArchiveOutcome { Archived, Buffered };

struct ArchiveResult {
    ArchiveOutcome outcome;
    int node_id = -1;  // valid when Archived
};

struct ArchiveConfig {
    double tau = 0.85;              // edge similarity threshold
    size_t buffer_capacity = 10000; // failure buffer, FIFO eviction

    bool operator==(const ArchiveConfig&) const = default;
};

// Contextual standards archive: an undirected attributed graph of
// fully-verified trajectories. An edge (i,j) exists iff
// cosine(h_i, h_j) >= tau AND the label sets are identical.
// Single-writer/multi-reader: mutations take the exclusive lock, reads the
// shared one.
class StandardsArchive {
public:
    StandardsArchive(std::shared_ptr<const EmbeddingProvider> provider,
                     ArchiveConfig config = {},
                     TermBinning binning = TermBinning::standard());

    StandardsArchive(StandardsArchive&& other) noexcept;
    StandardsArchive& operator=(StandardsArchive&& other) noexcept;
    StandardsArchive(const StandardsArchive&) = delete;
    StandardsArchive& operator=(const StandardsArchive&) = delete;

    // Purity gate: archives only when all three subtasks match gold;
    // everything else lands in the failure buffer. Throws when gold is absent.
    ArchiveResult archive_trajectory(const CaseRecord& case_record,
                                     const std::string& trace, const Verdict& pred);

    // Re-applies the edge rule for one node; returns edges actually added.
    std::vector<std::pair<int, int>> connect_node(int node_id);

    // One-pass first-neighbor clustering. Each node links to its nearest
    // neighbor by cosine (ties: lowest node_id); clusters are the connected
    // components of that adjacency, numbered by smallest member node_id.
    std::map<int, int> assign_clusters();

    // Closed k-hop neighborhood (start node included).
    std::set<int> neighbors(int node_id, int hops) const;

    // Nodes archived since the last evolution mark; reset advances the mark.
    long pending_batch(bool reset);

    // The batch frozen by the most recent reset, for the evolution phases.
    std::vector<int> current_batch_ids() const;

    // Moves out every buffered failure (an evolution cycle consumes them).
    std::vector<FailureEntry> drain_failures();
    size_t failure_count() const;

    size_t size() const;
    StandardNode node(int node_id) const;
    std::vector<StandardNode> snapshot() const;
    std::vector<std::pair<int, int>> edges() const;
    bool has_edge(int a, int b) const;
    double tau() const { return config_.tau; }

    // Top-k node ids by cosine to the query, ties by ascending node_id.
    std::vector<int> nearest_nodes(const UnitVector& query, size_t k) const;

    // Persistence: nodes.jsonl, edges.jsonl, buffer.jsonl, meta.json in `dir`.
    void save(const std::string& dir) const;
    static StandardsArchive load(const std::string& dir,
                                 std::shared_ptr<const EmbeddingProvider> provider,
                                 ArchiveConfig config = {},
                                 TermBinning binning = TermBinning::standard());

private:
    void connect_locked(int node_id, std::vector<std::pair<int, int>>* added);
    const StandardNode& node_locked(int node_id) const;

    std::shared_ptr<const EmbeddingProvider> provider_;
    ArchiveConfig config_;
    TermBinning binning_;
    std::vector<StandardNode> nodes_;  // node_id == index
    std::vector<std::set<int>> adj_;
    std::deque<FailureEntry> buffer_;
    long next_seq_ = 0;
    long batch_lo_ = -1;  // previous evolution mark
    long batch_hi_ = -1;  // current evolution mark
    mutable std::shared_mutex mutex_;
};

// Serialized trajectory text archived and embedded for a case.
std::string trajectory_text(const CaseRecord& case_record, const std::string& trace,
                            const Verdict& pred);

}  // namespace collegium

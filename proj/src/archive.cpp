#include "collegium/archive.hpp"

#include <algorithm>
#include <mutex>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "collegium/errors.hpp"

namespace collegium {

namespace {

nlohmann::json labels_to_json(const LabelSet& labels) {
    return {{"articles", labels.articles}, {"charges", labels.charges}};
}

LabelSet labels_from_json(const nlohmann::json& j) {
    LabelSet labels;
    for (const auto& a : j.at("articles")) labels.articles.insert(a.get<int>());
    for (const auto& c : j.at("charges")) labels.charges.insert(c.get<std::string>());
    return labels;
}

}  // namespace

std::string trajectory_text(const CaseRecord& case_record, const std::string& trace,
                            const Verdict& pred) {
    return case_record.fact_text + "\n" + trace + "\n" + verdict_to_json(pred).dump();
}

StandardsArchive::StandardsArchive(std::shared_ptr<const EmbeddingProvider> provider,
                                   ArchiveConfig config, TermBinning binning)
    : provider_(std::move(provider)), config_(config), binning_(std::move(binning)) {
    if (!provider_) throw Error(ErrorKind::Config, "archive needs an embedding provider");
    if (config_.tau <= 0.0 || config_.tau >= 1.0)
        throw Error(ErrorKind::Config, "edge threshold tau must lie in (0,1)");
}

StandardsArchive::StandardsArchive(StandardsArchive&& other) noexcept
    : provider_(std::move(other.provider_)),
      config_(other.config_),
      binning_(std::move(other.binning_)),
      nodes_(std::move(other.nodes_)),
      adj_(std::move(other.adj_)),
      buffer_(std::move(other.buffer_)),
      next_seq_(other.next_seq_),
      batch_lo_(other.batch_lo_),
      batch_hi_(other.batch_hi_) {}

StandardsArchive& StandardsArchive::operator=(StandardsArchive&& other) noexcept {
    if (this != &other) {
        provider_ = std::move(other.provider_);
        config_ = other.config_;
        binning_ = std::move(other.binning_);
        nodes_ = std::move(other.nodes_);
        adj_ = std::move(other.adj_);
        buffer_ = std::move(other.buffer_);
        next_seq_ = other.next_seq_;
        batch_lo_ = other.batch_lo_;
        batch_hi_ = other.batch_hi_;
    }
    return *this;
}

ArchiveResult StandardsArchive::archive_trajectory(const CaseRecord& case_record,
                                                   const std::string& trace,
                                                   const Verdict& pred) {
    if (!case_record.gold)
        throw Error(ErrorKind::Validation,
                    "cannot archive " + case_record.id + ": gold verdict missing");
    const MatchReport match = verdict_matches(pred, *case_record.gold, binning_);

    std::unique_lock lock(mutex_);
    if (!match.all_correct) {
        if (buffer_.size() >= config_.buffer_capacity) buffer_.pop_front();
        buffer_.push_back({case_record, trace, pred, *case_record.gold});
        return {ArchiveOutcome::Buffered, -1};
    }

    StandardNode node;
    node.node_id = static_cast<int>(nodes_.size());
    node.txt = trajectory_text(case_record, trace, pred);
    node.vector = provider_->embed(node.txt);
    node.labels = label_set(*case_record.gold);
    node.created_seq = next_seq_++;
    nodes_.push_back(std::move(node));
    adj_.emplace_back();
    connect_locked(nodes_.back().node_id, nullptr);
    return {ArchiveOutcome::Archived, nodes_.back().node_id};
}

void StandardsArchive::connect_locked(int node_id,
                                      std::vector<std::pair<int, int>>* added) {
    const StandardNode& self = nodes_[node_id];
    for (const StandardNode& other : nodes_) {
        if (other.node_id == node_id) continue;
        if (adj_[node_id].count(other.node_id)) continue;
        if (!(other.labels == self.labels)) continue;
        if (cosine(self.vector, other.vector) < config_.tau) continue;
        adj_[node_id].insert(other.node_id);
        adj_[other.node_id].insert(node_id);
        if (added)
            added->emplace_back(std::min(node_id, other.node_id),
                                std::max(node_id, other.node_id));
    }
}

const StandardNode& StandardsArchive::node_locked(int node_id) const {
    if (node_id < 0 || node_id >= static_cast<int>(nodes_.size()))
        throw Error(ErrorKind::NotFound, "unknown node id " + std::to_string(node_id));
    return nodes_[node_id];
}

std::vector<std::pair<int, int>> StandardsArchive::connect_node(int node_id) {
    std::unique_lock lock(mutex_);
    node_locked(node_id);
    std::vector<std::pair<int, int>> added;
    connect_locked(node_id, &added);
    return added;
}

std::map<int, int> StandardsArchive::assign_clusters() {
    std::unique_lock lock(mutex_);
    const size_t n = nodes_.size();
    if (n == 0) throw Error(ErrorKind::Validation, "cannot cluster an empty archive");

    // First neighbor of each node; ties resolved toward the lowest node_id.
    std::vector<int> first(n);
    for (size_t i = 0; i < n; ++i) {
        int best = static_cast<int>(i);
        double best_sim = -2.0;
        for (size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double sim = cosine(nodes_[i].vector, nodes_[j].vector);
            if (sim > best_sim) {
                best_sim = sim;
                best = static_cast<int>(j);
            }
        }
        first[i] = best;
    }

    // Union over i ~ first[i] yields the components of the adjacency
    // A(i,j) = [j = k(i) or i = k(j) or k(i) = k(j)].
    std::vector<int> parent(n);
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (size_t i = 0; i < n; ++i) {
        const int a = find(static_cast<int>(i));
        const int b = find(first[i]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

    // Components keyed by smallest member, numbered in that order.
    std::map<int, std::vector<int>> components;
    for (size_t i = 0; i < n; ++i) components[find(static_cast<int>(i))].push_back(i);
    std::map<int, int> assignment;
    int next_cluster = 0;
    for (const auto& [root, members] : components) {
        for (int member : members) {
            nodes_[member].cluster_id = next_cluster;
            assignment[member] = next_cluster;
        }
        ++next_cluster;
    }
    return assignment;
}

std::set<int> StandardsArchive::neighbors(int node_id, int hops) const {
    std::shared_lock lock(mutex_);
    node_locked(node_id);
    if (hops < 0) throw Error(ErrorKind::Validation, "hops must be >= 0");
    std::set<int> seen{node_id};
    std::vector<int> frontier{node_id};
    for (int depth = 0; depth < hops && !frontier.empty(); ++depth) {
        std::vector<int> next;
        for (int u : frontier)
            for (int v : adj_[u])
                if (seen.insert(v).second) next.push_back(v);
        frontier = std::move(next);
    }
    return seen;
}

long StandardsArchive::pending_batch(bool reset) {
    std::unique_lock lock(mutex_);
    long pending = 0;
    for (const StandardNode& node : nodes_)
        if (node.created_seq > batch_hi_) ++pending;
    if (reset) {
        batch_lo_ = batch_hi_;
        batch_hi_ = next_seq_ - 1;
    }
    return pending;
}

std::vector<int> StandardsArchive::current_batch_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<int> ids;
    for (const StandardNode& node : nodes_)
        if (node.created_seq > batch_lo_ && node.created_seq <= batch_hi_)
            ids.push_back(node.node_id);
    return ids;
}

std::vector<FailureEntry> StandardsArchive::drain_failures() {
    std::unique_lock lock(mutex_);
    std::vector<FailureEntry> out(buffer_.begin(), buffer_.end());
    buffer_.clear();
    return out;
}

size_t StandardsArchive::failure_count() const {
    std::shared_lock lock(mutex_);
    return buffer_.size();
}

size_t StandardsArchive::size() const {
    std::shared_lock lock(mutex_);
    return nodes_.size();
}

StandardNode StandardsArchive::node(int node_id) const {
    std::shared_lock lock(mutex_);
    return node_locked(node_id);
}

std::vector<StandardNode> StandardsArchive::snapshot() const {
    std::shared_lock lock(mutex_);
    return nodes_;
}

std::vector<std::pair<int, int>> StandardsArchive::edges() const {
    std::shared_lock lock(mutex_);
    std::vector<std::pair<int, int>> out;
    for (size_t i = 0; i < adj_.size(); ++i)
        for (int j : adj_[i])
            if (static_cast<int>(i) < j) out.emplace_back(i, j);
    return out;
}

bool StandardsArchive::has_edge(int a, int b) const {
    std::shared_lock lock(mutex_);
    if (a < 0 || a >= static_cast<int>(adj_.size())) return false;
    return adj_[a].count(b) > 0;
}

std::vector<int> StandardsArchive::nearest_nodes(const UnitVector& query, size_t k) const {
    std::shared_lock lock(mutex_);
    std::vector<std::pair<double, int>> scored;
    scored.reserve(nodes_.size());
    for (const StandardNode& node : nodes_)
        scored.emplace_back(cosine(query, node.vector), node.node_id);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (scored.size() > k) scored.resize(k);
    std::vector<int> ids;
    ids.reserve(scored.size());
    for (const auto& [sim, id] : scored) ids.push_back(id);
    return ids;
}

void StandardsArchive::save(const std::string& dir) const {
    std::shared_lock lock(mutex_);
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/nodes.jsonl");
        if (!out) throw Error(ErrorKind::Io, "cannot write " + dir + "/nodes.jsonl");
        for (const StandardNode& node : nodes_) {
            nlohmann::json j{{"node_id", node.node_id},
                             {"txt", node.txt},
                             {"vector", node.vector.values()},
                             {"labels", labels_to_json(node.labels)},
                             {"cluster_id", node.cluster_id},
                             {"created_seq", node.created_seq}};
            out << j.dump() << "\n";
        }
    }
    {
        std::ofstream out(dir + "/edges.jsonl");
        for (size_t i = 0; i < adj_.size(); ++i)
            for (int j : adj_[i])
                if (static_cast<int>(i) < j)
                    out << nlohmann::json{{"a", i}, {"b", j}}.dump() << "\n";
    }
    {
        std::ofstream out(dir + "/buffer.jsonl");
        for (const FailureEntry& entry : buffer_) {
            nlohmann::json j{{"case", case_to_json(entry.case_record)},
                             {"trace", entry.trace},
                             {"predicted", verdict_to_json(entry.predicted)},
                             {"gold", verdict_to_json(entry.gold)}};
            out << j.dump() << "\n";
        }
    }
    {
        std::ofstream out(dir + "/meta.json");
        out << nlohmann::json{{"next_seq", next_seq_},
                              {"batch_lo", batch_lo_},
                              {"batch_hi", batch_hi_},
                              {"tau", config_.tau}}
                   .dump(2)
            << "\n";
    }
}

StandardsArchive StandardsArchive::load(const std::string& dir,
                                        std::shared_ptr<const EmbeddingProvider> provider,
                                        ArchiveConfig config, TermBinning binning) {
    StandardsArchive archive(std::move(provider), config, std::move(binning));
    const std::string nodes_path = dir + "/nodes.jsonl";
    if (!std::filesystem::exists(nodes_path)) return archive;  // fresh store

    std::ifstream nodes_in(nodes_path);
    std::string line;
    while (std::getline(nodes_in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        StandardNode node;
        node.node_id = j.at("node_id").get<int>();
        node.txt = j.at("txt").get<std::string>();
        node.vector = UnitVector(j.at("vector").get<std::vector<double>>());
        node.labels = labels_from_json(j.at("labels"));
        node.cluster_id = j.at("cluster_id").get<int>();
        node.created_seq = j.at("created_seq").get<long>();
        if (node.node_id != static_cast<int>(archive.nodes_.size()))
            throw Error(ErrorKind::Parse, "node ids out of order in " + nodes_path);
        archive.nodes_.push_back(std::move(node));
        archive.adj_.emplace_back();
    }
    std::ifstream edges_in(dir + "/edges.jsonl");
    while (std::getline(edges_in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        const int a = j.at("a").get<int>();
        const int b = j.at("b").get<int>();
        archive.adj_.at(a).insert(b);
        archive.adj_.at(b).insert(a);
    }
    std::ifstream buffer_in(dir + "/buffer.jsonl");
    while (std::getline(buffer_in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        FailureEntry entry;
        entry.case_record = case_from_json(j.at("case"));
        entry.trace = j.at("trace").get<std::string>();
        entry.predicted = verdict_from_json(j.at("predicted"));
        entry.gold = verdict_from_json(j.at("gold"));
        archive.buffer_.push_back(std::move(entry));
    }
    std::ifstream meta_in(dir + "/meta.json");
    if (meta_in) {
        nlohmann::json meta = nlohmann::json::parse(meta_in);
        archive.next_seq_ = meta.at("next_seq").get<long>();
        archive.batch_lo_ = meta.at("batch_lo").get<long>();
        archive.batch_hi_ = meta.at("batch_hi").get<long>();
    } else {
        archive.next_seq_ = static_cast<long>(archive.nodes_.size());
    }
    return archive;
}

}  // namespace collegium

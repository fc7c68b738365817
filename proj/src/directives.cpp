#include "collegium/directives.hpp"

#include <algorithm>
#include <mutex>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "collegium/errors.hpp"

namespace collegium {

DirectiveBase::DirectiveBase(std::shared_ptr<const EmbeddingProvider> provider,
                             DirectiveBaseConfig config)
    : provider_(std::move(provider)), config_(config) {
    if (!provider_) throw Error(ErrorKind::Config, "directive base needs a provider");
    if (!(config_.prune_threshold > 0.0 && config_.prune_threshold < config_.tau_max))
        throw Error(ErrorKind::Config, "need 0 < prune_threshold < tau_max");
    if (config_.decay_factor <= 0.0 || config_.decay_factor >= 1.0)
        throw Error(ErrorKind::Config, "decay factor must lie in (0,1)");
}

DirectiveBase::DirectiveBase(DirectiveBase&& other) noexcept
    : provider_(std::move(other.provider_)),
      config_(other.config_),
      directives_(std::move(other.directives_)),
      next_id_(other.next_id_) {}

DirectiveBase& DirectiveBase::operator=(DirectiveBase&& other) noexcept {
    if (this != &other) {
        provider_ = std::move(other.provider_);
        config_ = other.config_;
        directives_ = std::move(other.directives_);
        next_id_ = other.next_id_;
    }
    return *this;
}

Directive& DirectiveBase::directive_locked(int id) {
    auto it = directives_.find(id);
    if (it == directives_.end())
        throw Error(ErrorKind::NotFound, "unknown directive id " + std::to_string(id));
    return it->second;
}

const Directive& DirectiveBase::directive_locked(int id) const {
    auto it = directives_.find(id);
    if (it == directives_.end())
        throw Error(ErrorKind::NotFound, "unknown directive id " + std::to_string(id));
    return it->second;
}

int DirectiveBase::add_directive(const std::string& text,
                                 const std::set<int>& anchor_articles,
                                 const std::set<int>& supporting,
                                 const std::set<int>& conflicting) {
    if (text.empty()) throw Error(ErrorKind::Validation, "directive text is empty");
    if (anchor_articles.empty())
        throw Error(ErrorKind::Validation, "directive anchor is empty");

    std::unique_lock lock(mutex_);
    Directive d;
    d.directive_id = next_id_++;
    d.text = text;
    d.confidence = config_.initial_confidence;
    d.supporting = supporting;
    for (int id : conflicting)
        if (!d.supporting.count(id)) d.conflicting.insert(id);
    d.anchor_articles = anchor_articles;
    d.vector = provider_->embed(text);
    const int id = d.directive_id;
    directives_.emplace(id, std::move(d));
    return id;
}

void DirectiveBase::refine_directive(int id, const std::string& new_text,
                                     const std::set<int>& added_support,
                                     const std::set<int>& added_conflict) {
    std::unique_lock lock(mutex_);
    Directive& d = directive_locked(id);
    if (!new_text.empty()) {
        d.text = new_text;
        d.vector = provider_->embed(new_text);
    }
    for (int node : added_support)
        if (!d.conflicting.count(node)) d.supporting.insert(node);
    for (int node : added_conflict) {
        d.supporting.erase(node);  // contradiction wins
        d.conflicting.insert(node);
    }
}

double DirectiveBase::record_outcome(int id, DirectiveOutcome outcome) {
    std::unique_lock lock(mutex_);
    Directive& d = directive_locked(id);
    if (outcome == DirectiveOutcome::Supported)
        d.confidence = std::min(d.confidence + config_.support_increment, config_.tau_max);
    else
        d.confidence *= config_.decay_factor;
    return d.confidence;
}

std::vector<int> DirectiveBase::prune() {
    std::unique_lock lock(mutex_);
    std::vector<int> removed;
    for (auto it = directives_.begin(); it != directives_.end();) {
        if (it->second.confidence < config_.prune_threshold) {
            removed.push_back(it->first);
            it = directives_.erase(it);
        } else {
            ++it;
        }
    }
    return removed;
}

int DirectiveBase::consolidate(const std::vector<int>& group,
                               const std::string& merged_text) {
    if (group.size() < 2)
        throw Error(ErrorKind::Validation, "consolidation needs >= 2 directives");
    if (merged_text.empty())
        throw Error(ErrorKind::Validation, "merged directive text is empty");

    std::unique_lock lock(mutex_);
    const Directive& head = directive_locked(group.front());
    const std::set<int> anchor = head.anchor_articles;
    double total = 0.0;
    std::set<int> supporting;
    std::set<int> conflicting;
    for (int id : group) {
        const Directive& d = directive_locked(id);
        if (d.anchor_articles != anchor)
            throw Error(ErrorKind::Validation,
                        "consolidation group mixes anchors (directive " +
                            std::to_string(id) + ")");
        total += d.confidence;
        supporting.insert(d.supporting.begin(), d.supporting.end());
        conflicting.insert(d.conflicting.begin(), d.conflicting.end());
    }
    for (int node : conflicting) supporting.erase(node);

    for (int id : group) directives_.erase(id);
    Directive merged;
    merged.directive_id = next_id_++;
    merged.text = merged_text;
    merged.confidence = std::min(total, config_.tau_max);
    merged.supporting = std::move(supporting);
    merged.conflicting = std::move(conflicting);
    merged.anchor_articles = anchor;
    merged.vector = provider_->embed(merged_text);
    const int id = merged.directive_id;
    directives_.emplace(id, std::move(merged));
    return id;
}

Directive DirectiveBase::directive(int id) const {
    std::shared_lock lock(mutex_);
    return directive_locked(id);
}

bool DirectiveBase::contains(int id) const {
    std::shared_lock lock(mutex_);
    return directives_.count(id) > 0;
}

size_t DirectiveBase::size() const {
    std::shared_lock lock(mutex_);
    return directives_.size();
}

std::vector<Directive> DirectiveBase::snapshot() const {
    std::shared_lock lock(mutex_);
    std::vector<Directive> out;
    out.reserve(directives_.size());
    for (const auto& [id, d] : directives_) out.push_back(d);
    return out;
}

void DirectiveBase::save(const std::string& dir) const {
    std::shared_lock lock(mutex_);
    std::filesystem::create_directories(dir);
    std::ofstream out(dir + "/directives.jsonl");
    if (!out) throw Error(ErrorKind::Io, "cannot write " + dir + "/directives.jsonl");
    for (const auto& [id, d] : directives_) {
        nlohmann::json j{{"directive_id", d.directive_id},
                         {"text", d.text},
                         {"confidence", d.confidence},
                         {"supporting", d.supporting},
                         {"conflicting", d.conflicting},
                         {"anchor_articles", d.anchor_articles},
                         {"vector", d.vector.values()}};
        out << j.dump() << "\n";
    }
    std::ofstream meta(dir + "/directives_meta.json");
    meta << nlohmann::json{{"next_id", next_id_}}.dump(2) << "\n";
}

DirectiveBase DirectiveBase::load(const std::string& dir,
                                  std::shared_ptr<const EmbeddingProvider> provider,
                                  DirectiveBaseConfig config) {
    DirectiveBase base(std::move(provider), config);
    const std::string path = dir + "/directives.jsonl";
    if (!std::filesystem::exists(path)) return base;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        Directive d;
        d.directive_id = j.at("directive_id").get<int>();
        d.text = j.at("text").get<std::string>();
        d.confidence = j.at("confidence").get<double>();
        for (const auto& n : j.at("supporting")) d.supporting.insert(n.get<int>());
        for (const auto& n : j.at("conflicting")) d.conflicting.insert(n.get<int>());
        for (const auto& a : j.at("anchor_articles"))
            d.anchor_articles.insert(a.get<int>());
        d.vector = UnitVector(j.at("vector").get<std::vector<double>>());
        base.next_id_ = std::max(base.next_id_, d.directive_id + 1);
        base.directives_.emplace(d.directive_id, std::move(d));
    }
    std::ifstream meta(dir + "/directives_meta.json");
    if (meta) {
        nlohmann::json j = nlohmann::json::parse(meta);
        base.next_id_ = std::max(base.next_id_, j.at("next_id").get<int>());
    }
    return base;
}

}  // namespace collegium

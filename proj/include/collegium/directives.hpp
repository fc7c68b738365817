#pragma once

#include <map>
#include <memory>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "collegium/embedding.hpp"

namespace collegium {

// A distilled micro-directive: a context-specific reading of the law bound
// to a statute anchor, with traceable supporting/conflicting precedent ids
// and a bounded confidence acting as its lifespan.
struct Directive {
    int directive_id = -1;
    std::string text;
    double confidence = 0.0;
    std::set<int> supporting;   // archive node ids
    std::set<int> conflicting;  // archive node ids, disjoint from supporting
    std::set<int> anchor_articles;
    UnitVector vector;  // embedding of text
};

struct DirectiveBaseConfig {
    double prune_threshold = 0.3;
    double tau_max = 10.0;  // confidence cap
    double support_increment = 1.0;
    double decay_factor = 0.8;
    double initial_confidence = 1.0;

    bool operator==(const DirectiveBaseConfig&) const = default;
};

enum class DirectiveOutcome { Supported, Contradicted };

class DirectiveBase {
public:
    DirectiveBase(std::shared_ptr<const EmbeddingProvider> provider,
                  DirectiveBaseConfig config = {});

    DirectiveBase(DirectiveBase&& other) noexcept;
    DirectiveBase& operator=(DirectiveBase&& other) noexcept;
    DirectiveBase(const DirectiveBase&) = delete;
    DirectiveBase& operator=(const DirectiveBase&) = delete;

    int add_directive(const std::string& text, const std::set<int>& anchor_articles,
                      const std::set<int>& supporting = {},
                      const std::set<int>& conflicting = {});

    // Replaces the text (empty text keeps the old one), merges evidence sets.
    // A node id arriving on the conflict side is moved out of supporting.
    void refine_directive(int id, const std::string& new_text,
                          const std::set<int>& added_support,
                          const std::set<int>& added_conflict);

    // Supported: confidence = min(confidence + increment, tau_max).
    // Contradicted: confidence *= decay_factor. Returns the new confidence.
    double record_outcome(int id, DirectiveOutcome outcome);

    // Removes every directive with confidence strictly below the threshold.
    std::vector<int> prune();

    // Replaces >= 2 same-anchor directives by one merged directive whose
    // confidence is the clipped sum of the members'.
    int consolidate(const std::vector<int>& group, const std::string& merged_text);

    Directive directive(int id) const;
    bool contains(int id) const;
    size_t size() const;
    std::vector<Directive> snapshot() const;
    const DirectiveBaseConfig& config() const { return config_; }

    void save(const std::string& dir) const;
    static DirectiveBase load(const std::string& dir,
                              std::shared_ptr<const EmbeddingProvider> provider,
                              DirectiveBaseConfig config = {});

private:
    Directive& directive_locked(int id);
    const Directive& directive_locked(int id) const;

    std::shared_ptr<const EmbeddingProvider> provider_;
    DirectiveBaseConfig config_;
    std::map<int, Directive> directives_;
    int next_id_ = 0;
    mutable std::shared_mutex mutex_;
};

}  // namespace collegium

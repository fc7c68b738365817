#pragma once

#include <istream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "collegium/embedding.hpp"

namespace collegium {

struct Statute {
    int article_id = 0;
    std::string title;
    std::string text;
    UnitVector vector;  // embedding of title + text
};

// Immutable statute collection with flat cosine search. Statute file format:
// one {"article_id": int, "title": str, "text": str} record per line.
class StatuteLibrary {
public:
    StatuteLibrary() = default;

    static StatuteLibrary load(std::istream& in,
                               std::shared_ptr<const EmbeddingProvider> provider);
    static StatuteLibrary load_file(const std::string& path,
                                    std::shared_ptr<const EmbeddingProvider> provider);

    // Top-k by cosine to the query embedding, descending; ties broken by
    // ascending article_id. Returns fewer than k when the library is smaller.
    std::vector<std::pair<int, double>> search(std::string_view query, size_t k) const;

    const Statute* find(int article_id) const;
    size_t size() const { return statutes_.size(); }
    const std::map<int, Statute>& statutes() const { return statutes_; }

private:
    std::map<int, Statute> statutes_;
    std::shared_ptr<const EmbeddingProvider> provider_;
};

}  // namespace collegium

#include "collegium/statutes.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "collegium/errors.hpp"

namespace collegium {

StatuteLibrary StatuteLibrary::load(std::istream& in,
                                    std::shared_ptr<const EmbeddingProvider> provider) {
    if (!provider) throw Error(ErrorKind::Config, "statute library needs a provider");
    StatuteLibrary lib;
    lib.provider_ = std::move(provider);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object() ||
            !record.contains("article_id") || !record.at("article_id").is_number_integer() ||
            !record.contains("text") || !record.at("text").is_string())
            throw Error(ErrorKind::Parse,
                        "malformed statute record at line " + std::to_string(line_no));
        Statute s;
        s.article_id = record.at("article_id").get<int>();
        s.title = record.value("title", std::string{});
        s.text = record.at("text").get<std::string>();
        if (s.text.empty())
            throw Error(ErrorKind::Validation,
                        "empty statute text at line " + std::to_string(line_no));
        if (lib.statutes_.count(s.article_id))
            throw Error(ErrorKind::DuplicateId,
                        "duplicate article_id " + std::to_string(s.article_id) +
                            " at line " + std::to_string(line_no));
        s.vector = lib.provider_->embed(s.title.empty() ? s.text : s.title + "\n" + s.text);
        lib.statutes_.emplace(s.article_id, std::move(s));
    }
    return lib;
}

StatuteLibrary StatuteLibrary::load_file(const std::string& path,
                                         std::shared_ptr<const EmbeddingProvider> provider) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open statute file " + path);
    return load(in, std::move(provider));
}

std::vector<std::pair<int, double>> StatuteLibrary::search(std::string_view query,
                                                           size_t k) const {
    if (k < 1) throw Error(ErrorKind::Validation, "search needs k >= 1");
    std::vector<std::pair<int, double>> scored;
    if (statutes_.empty()) return scored;
    const UnitVector q = provider_->embed(query);
    scored.reserve(statutes_.size());
    for (const auto& [id, statute] : statutes_)
        scored.emplace_back(id, cosine(q, statute.vector));
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

const Statute* StatuteLibrary::find(int article_id) const {
    auto it = statutes_.find(article_id);
    return it == statutes_.end() ? nullptr : &it->second;
}

}  // namespace collegium

#include "collegium/embedding.hpp"

#include <cmath>

#include "collegium/errors.hpp"

namespace collegium {

UnitVector UnitVector::normalized(std::vector<double> values) {
    double norm_sq = 0.0;
    for (double v : values) norm_sq += v * v;
    if (norm_sq <= 0.0)
        throw Error(ErrorKind::Validation, "cannot normalize a zero vector");
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : values) v *= inv;
    return UnitVector(std::move(values));
}

double cosine(const UnitVector& a, const UnitVector& b) {
    if (a.dim() != b.dim())
        throw Error(ErrorKind::DimensionMismatch,
                    "cosine over dims " + std::to_string(a.dim()) + " and " +
                        std::to_string(b.dim()));
    double dot = 0.0;
    for (size_t i = 0; i < a.dim(); ++i) dot += a[i] * b[i];
    return dot;
}

namespace {

// splitmix64; stable across platforms, cheap enough for per-trigram use.
uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

HashingEmbedder::HashingEmbedder(size_t dim, uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim_ < 8) throw Error(ErrorKind::Config, "embedding dim must be >= 8");
}

UnitVector HashingEmbedder::embed(std::string_view text) const {
    if (text.empty()) throw Error(ErrorKind::Validation, "cannot embed empty text");
    // Boundary sentinels guarantee >= 3 trigrams for any non-empty text.
    std::string padded;
    padded.reserve(text.size() + 4);
    padded.push_back('\x02');
    padded.push_back('\x02');
    padded.append(text);
    padded.push_back('\x03');
    padded.push_back('\x03');

    std::vector<double> acc(dim_, 0.0);
    for (size_t i = 0; i + 3 <= padded.size(); ++i) {
        uint64_t h = seed_;
        h = mix64(h ^ static_cast<unsigned char>(padded[i]));
        h = mix64(h ^ static_cast<unsigned char>(padded[i + 1]));
        h = mix64(h ^ static_cast<unsigned char>(padded[i + 2]));
        const size_t bucket = h % dim_;
        const double sign = (h >> 63) ? 1.0 : -1.0;
        acc[bucket] += sign;
    }
    double norm_sq = 0.0;
    for (double v : acc) norm_sq += v * v;
    if (norm_sq == 0.0) {
        // Signs cancelled in every bucket; fall back to a one-hot on the
        // whole-text hash so the contract (non-zero, normalized) holds.
        uint64_t h = seed_;
        for (char c : padded) h = mix64(h ^ static_cast<unsigned char>(c));
        acc[h % dim_] = 1.0;
    }
    return UnitVector::normalized(std::move(acc));
}

std::shared_ptr<EmbeddingProvider> make_embedding_provider(
    const EmbeddingProviderConfig& config) {
    if (config.kind == "deterministic-hash")
        return std::make_shared<HashingEmbedder>(config.dim, config.seed);
    if (config.kind == "remote") return make_remote_embedder(config);
    throw Error(ErrorKind::Config, "unknown embedding provider kind " + config.kind);
}

}  // namespace collegium

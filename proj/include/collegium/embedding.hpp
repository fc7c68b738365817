#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace collegium {

// L2-normalized dense vector. Construct through `normalized` (or a provider);
// the raw constructor trusts its input.
class UnitVector {
public:
    UnitVector() = default;
    explicit UnitVector(std::vector<double> values) : values_(std::move(values)) {}

    static UnitVector normalized(std::vector<double> values);

    size_t dim() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](size_t i) const { return values_[i]; }

    bool operator==(const UnitVector&) const = default;

private:
    std::vector<double> values_;
};

// Dot product of unit vectors. Throws Error(DimensionMismatch) on unequal dims.
double cosine(const UnitVector& a, const UnitVector& b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    // Deterministic providers return the same vector for the same text.
    // Output is always L2-normalized. Throws Error(Transport) when a remote
    // service fails, Error(Validation) on empty text.
    virtual UnitVector embed(std::string_view text) const = 0;

    virtual size_t dim() const = 0;
};

// Offline provider: character-trigram feature hashing with a fixed seed.
// The text is padded with boundary sentinels so any non-empty input yields
// at least one feature; buckets get a hash-derived sign before normalization.
class HashingEmbedder : public EmbeddingProvider {
public:
    explicit HashingEmbedder(size_t dim = 256, uint64_t seed = 0x5eed5eed5eed5eedULL);

    UnitVector embed(std::string_view text) const override;
    size_t dim() const override { return dim_; }
    uint64_t seed() const { return seed_; }

private:
    size_t dim_;
    uint64_t seed_;
};

struct EmbeddingProviderConfig {
    std::string kind = "deterministic-hash";  // or "remote"
    size_t dim = 256;
    uint64_t seed = 0x5eed5eed5eed5eedULL;
    std::string endpoint;  // remote only
    std::string model;     // remote only
    std::string api_key_env;

    bool operator==(const EmbeddingProviderConfig&) const = default;
};

// Remote provider speaking the generic embeddings interface:
//   POST {endpoint}  {"model": ..., "input": [text]}
//   -> {"data": [{"embedding": [...]}]}
// Vectors are re-normalized on receipt. Defined in remote.cpp.
std::shared_ptr<EmbeddingProvider> make_remote_embedder(const EmbeddingProviderConfig& config);

std::shared_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& config);

}  // namespace collegium

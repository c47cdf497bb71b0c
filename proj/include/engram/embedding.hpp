#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace engram {

// Fixed seed of the local feature-hashing embedder. It is part of the on-disk
// store format: changing it must bump kLocalHashSeedVersion so existing stores
// are re-embedded instead of silently mismatched.
inline constexpr std::uint64_t kLocalHashSeed = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint32_t kLocalHashSeedVersion = 1;
inline constexpr const char* kLocalModelId = "local-hash-v1";

// A unit-length text embedding.
struct Embedding {
    std::vector<double> values;
    std::string model_id;

    std::size_t dimension() const { return values.size(); }
};

// Identifies the embedding space a store was written in. Every event in one
// store must share this fingerprint.
struct EmbedderFingerprint {
    std::string model_id;
    std::uint32_t dimension = 0;
    std::uint32_t hash_seed_version = 0;  // 0 for remote models

    bool operator==(const EmbedderFingerprint&) const = default;
    std::string describe() const;
};

struct EmbedderConfig {
    enum class Kind { local_hash, remote };

    Kind kind = Kind::local_hash;
    std::size_t dimension = 256;
    // Remote only:
    std::string endpoint_url;
    std::string model_id;            // declared id; response "model" overrides per embedding
    std::string auth_token_env_var;  // name of env var holding the bearer token
    int timeout_ms = 5000;
};

// Seeded 64-bit hash used for feature bucketing. Stable across platforms.
std::uint64_t stable_hash64(std::string_view bytes, std::uint64_t seed = kLocalHashSeed);

// Deterministic feature-hashing embedder: lowercases, splits on
// non-alphanumeric bytes, hashes every token and adjacent-token bigram into
// one of `dimension` signed buckets, then L2-normalizes. Throws
// NoFeaturesError when the text yields no tokens.
Embedding embed_local(std::string_view text, std::size_t dimension);

// Deterministically constructs a unit vector whose cosine similarity with
// `anchor` (itself unit length) is exactly `relevance`. Used to replay
// benchmark tables whose relevance columns are given numerically rather than
// as text. `variant` selects the orthogonal component, so distinct variants
// give distinct vectors with the same anchor similarity.
Embedding embedding_with_relevance_to(const Embedding& anchor, double relevance,
                                      std::uint64_t variant);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Embedding embed(std::string_view text) = 0;
    virtual EmbedderFingerprint fingerprint() const = 0;
};

class LocalHashEmbedder : public Embedder {
public:
    explicit LocalHashEmbedder(std::size_t dimension = 256);
    Embedding embed(std::string_view text) override;
    EmbedderFingerprint fingerprint() const override;

private:
    std::size_t dimension_;
};

// Client for an embedding HTTP service. POSTs {"input": <text>} and expects
// {"embedding": [..numbers..]} with an optional "model" field; the result is
// unit-normalized. Failures raise RemoteError with a distinct kind (timeout,
// unreachable, http_status, bad_response, dimension_mismatch) so callers can
// fall back to the local embedder.
class RemoteEmbedder : public Embedder {
public:
    explicit RemoteEmbedder(EmbedderConfig config);
    Embedding embed(std::string_view text) override;
    EmbedderFingerprint fingerprint() const override;

private:
    EmbedderConfig config_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

}  // namespace engram

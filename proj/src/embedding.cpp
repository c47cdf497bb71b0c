#include "engram/embedding.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

#include <httplib.h>
#include <json.hpp>

#include "engram/errors.hpp"

namespace engram {

std::string EmbedderFingerprint::describe() const {
    return model_id + "/dim=" + std::to_string(dimension) +
           "/seed-v" + std::to_string(hash_seed_version);
}

std::uint64_t stable_hash64(std::string_view bytes, std::uint64_t seed) {
    // FNV-1a over the bytes, then a splitmix64 finalizer so the high bit used
    // for the feature sign is well mixed.
    std::uint64_t h = seed ^ 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebull;
    h ^= h >> 31;
    return h;
}

namespace {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (c >= 0x80) {
            current.push_back(static_cast<char>(c));  // keep multi-byte sequences intact
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

void add_feature(std::vector<double>& buckets, std::string_view feature) {
    const std::uint64_t h = stable_hash64(feature);
    const std::size_t bucket = static_cast<std::size_t>(h % buckets.size());
    const double sign = (h & 0x8000000000000000ull) ? -1.0 : 1.0;
    buckets[bucket] += sign;
}

void normalize_in_place(std::vector<double>& values, const char* what) {
    double norm_sq = 0.0;
    for (double v : values) norm_sq += v * v;
    if (norm_sq <= 0.0) {
        throw NoFeaturesError(std::string(what) + ": all features cancelled to a zero vector");
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : values) v *= inv;
}

// Splits "http://host:port/some/path" into client base and path prefix.
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    if (url.empty()) {
        throw ValidationError("remote embedder requires an endpoint URL");
    }
    auto scheme_end = url.find("://");
    const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

Embedding embed_local(std::string_view text, std::size_t dimension) {
    if (dimension < 1) {
        throw ValidationError("embed_local: dimension must be >= 1");
    }
    const auto tokens = tokenize(text);
    if (tokens.empty()) {
        throw NoFeaturesError("embed_local: text has no alphanumeric tokens");
    }
    std::vector<double> buckets(dimension, 0.0);
    for (const auto& token : tokens) {
        add_feature(buckets, token);
    }
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        add_feature(buckets, tokens[i] + '\x1f' + tokens[i + 1]);
    }
    normalize_in_place(buckets, "embed_local");
    return Embedding{std::move(buckets), kLocalModelId};
}

Embedding embedding_with_relevance_to(const Embedding& anchor, double relevance,
                                      std::uint64_t variant) {
    if (anchor.dimension() < 2) {
        throw ValidationError("relevance construction needs dimension >= 2");
    }
    if (!(relevance >= -1.0) || !(relevance <= 1.0)) {
        throw ValidationError("target relevance must lie in [-1, 1]");
    }
    const std::size_t dim = anchor.dimension();
    // mt19937_64 output and this [-1, 1) mapping are bit-stable across
    // platforms; distribution shape does not matter here.
    std::mt19937_64 rng(kLocalHashSeed ^ (variant * 0x9E3779B97F4A7C15ull + 0x1234567u));
    std::vector<double> ortho(dim);
    for (int attempt = 0; attempt < 64; ++attempt) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            ortho[i] = 2.0 * u - 1.0;
            dot += ortho[i] * anchor.values[i];
        }
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            ortho[i] -= dot * anchor.values[i];
            norm_sq += ortho[i] * ortho[i];
        }
        if (norm_sq > 1e-12) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (double& v : ortho) v *= inv;
            Embedding out;
            out.model_id = anchor.model_id;
            out.values.resize(dim);
            const double tangent = std::sqrt(std::max(0.0, 1.0 - relevance * relevance));
            for (std::size_t i = 0; i < dim; ++i) {
                out.values[i] = relevance * anchor.values[i] + tangent * ortho[i];
            }
            return out;
        }
    }
    throw ValidationError("could not build an orthogonal complement for the anchor");
}

LocalHashEmbedder::LocalHashEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ < 8) {
        throw ValidationError("embedder dimension must be >= 8");
    }
}

Embedding LocalHashEmbedder::embed(std::string_view text) {
    return embed_local(text, dimension_);
}

EmbedderFingerprint LocalHashEmbedder::fingerprint() const {
    return {kLocalModelId, static_cast<std::uint32_t>(dimension_), kLocalHashSeedVersion};
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)) {
    if (config_.dimension < 8) {
        throw ValidationError("embedder dimension must be >= 8");
    }
    if (config_.endpoint_url.empty()) {
        throw ValidationError("remote embedder requires an endpoint URL");
    }
}

Embedding RemoteEmbedder::embed(std::string_view text) {
    const auto [base, path] = split_endpoint(config_.endpoint_url);
    httplib::Client client(base);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);
    client.set_write_timeout(0, config_.timeout_ms * 1000);
    httplib::Headers headers;
    if (!config_.auth_token_env_var.empty()) {
        if (const char* token = std::getenv(config_.auth_token_env_var.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    nlohmann::json body{{"input", std::string(text)}};
    auto result = client.Post(path, headers, body.dump(), "application/json");
    if (!result) {
        const auto err = result.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write) {
            throw RemoteError(RemoteError::Kind::timeout,
                              "embedding request timed out after " +
                                  std::to_string(config_.timeout_ms) + " ms");
        }
        throw RemoteError(RemoteError::Kind::unreachable,
                          "embedding endpoint unreachable: " + httplib::to_string(err));
    }
    if (result->status < 200 || result->status >= 300) {
        throw RemoteError(RemoteError::Kind::http_status,
                          "embedding endpoint returned HTTP " + std::to_string(result->status));
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
        throw RemoteError(RemoteError::Kind::bad_response,
                          std::string("embedding response is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("embedding") || !doc["embedding"].is_array()) {
        throw RemoteError(RemoteError::Kind::bad_response,
                          "embedding response lacks an \"embedding\" array");
    }

    Embedding out;
    out.values.reserve(doc["embedding"].size());
    for (const auto& v : doc["embedding"]) {
        if (!v.is_number()) {
            throw RemoteError(RemoteError::Kind::bad_response,
                              "embedding array contains a non-numeric entry");
        }
        out.values.push_back(v.get<double>());
    }
    if (out.values.size() != config_.dimension) {
        throw RemoteError(RemoteError::Kind::dimension_mismatch,
                          "embedding dimension " + std::to_string(out.values.size()) +
                              " does not match configured dimension " +
                              std::to_string(config_.dimension));
    }
    try {
        normalize_in_place(out.values, "remote embedding");
    } catch (const NoFeaturesError&) {
        throw RemoteError(RemoteError::Kind::bad_response, "embedding response is a zero vector");
    }
    out.model_id = doc.value("model", config_.model_id.empty() ? "remote" : config_.model_id);
    return out;
}

EmbedderFingerprint RemoteEmbedder::fingerprint() const {
    return {config_.model_id.empty() ? "remote" : config_.model_id,
            static_cast<std::uint32_t>(config_.dimension), 0};
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
    if (config.kind == EmbedderConfig::Kind::remote) {
        return std::make_unique<RemoteEmbedder>(config);
    }
    return std::make_unique<LocalHashEmbedder>(config.dimension);
}

}  // namespace engram

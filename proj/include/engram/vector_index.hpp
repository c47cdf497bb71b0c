#pragma once

#include <cstdint>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "engram/embedding.hpp"
#include "engram/memory_math.hpp"

namespace engram {

// Exact top-k cosine search over unit-length embeddings. A deliberate linear
// scan: dialogue histories stay small enough that determinism and exactness
// beat sublinear search. Readers may run concurrently; writes are exclusive.
class VectorIndex {
public:
    struct Hit {
        std::string event_id;
        Relevance relevance;
    };

    explicit VectorIndex(std::size_t dimension);

    // Entries must be unit length and match the index dimension.
    void insert(const std::string& event_id, const Embedding& embedding);
    void remove(const std::string& event_id);

    // The min(k, size) entries with greatest cosine similarity, descending.
    // Ties break by insertion order (oldest first), then lexicographic id.
    // Throws ValidationError when the index is empty or k < 1.
    std::vector<Hit> search(const Embedding& query, std::size_t k) const;

    bool contains(const std::string& event_id) const;
    std::size_t size() const;
    std::size_t dimension() const { return dimension_; }

private:
    struct Entry {
        std::string id;
        std::vector<double> values;
        std::uint64_t seq = 0;
    };

    std::size_t dimension_;
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::uint64_t next_seq_ = 0;
    mutable std::shared_mutex mutex_;
};

}  // namespace engram

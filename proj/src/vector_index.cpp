#include "engram/vector_index.hpp"

#include <algorithm>
#include <mutex>

#include "engram/errors.hpp"

namespace engram {

VectorIndex::VectorIndex(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ < 1) {
        throw ValidationError("vector index dimension must be >= 1");
    }
}

void VectorIndex::insert(const std::string& event_id, const Embedding& embedding) {
    std::unique_lock lock(mutex_);
    if (embedding.dimension() != dimension_) {
        throw ValidationError("index insert: embedding dimension " +
                              std::to_string(embedding.dimension()) + " does not match index (" +
                              std::to_string(dimension_) + ")");
    }
    if (by_id_.count(event_id) != 0) {
        throw ValidationError("index insert: duplicate id '" + event_id + "'");
    }
    entries_.push_back(Entry{event_id, embedding.values, next_seq_++});
    by_id_.emplace(event_id, entries_.size() - 1);
}

void VectorIndex::remove(const std::string& event_id) {
    std::unique_lock lock(mutex_);
    const auto it = by_id_.find(event_id);
    if (it == by_id_.end()) {
        throw ValidationError("index remove: unknown id '" + event_id + "'");
    }
    const std::size_t pos = it->second;
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(pos));
    by_id_.erase(it);
    for (auto& [id, idx] : by_id_) {
        if (idx > pos) --idx;
    }
}

std::vector<VectorIndex::Hit> VectorIndex::search(const Embedding& query, std::size_t k) const {
    std::shared_lock lock(mutex_);
    if (entries_.empty()) {
        throw ValidationError("index search: index is empty");
    }
    if (k < 1) {
        throw ValidationError("index search: k must be >= 1");
    }
    if (query.dimension() != dimension_) {
        throw ValidationError("index search: query dimension " +
                              std::to_string(query.dimension()) + " does not match index (" +
                              std::to_string(dimension_) + ")");
    }

    struct Scored {
        double similarity;
        const Entry* entry;
    };
    std::vector<Scored> scored;
    scored.reserve(entries_.size());
    for (const auto& entry : entries_) {
        // Entries and queries are unit length, so the dot product is the cosine.
        double dot = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) {
            dot += entry.values[i] * query.values[i];
        }
        scored.push_back({std::clamp(dot, -1.0, 1.0), &entry});
    }
    const std::size_t take = std::min(k, scored.size());
    const auto better = [](const Scored& a, const Scored& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        if (a.entry->seq != b.entry->seq) return a.entry->seq < b.entry->seq;
        return a.entry->id < b.entry->id;
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), better);

    std::vector<Hit> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        hits.push_back(Hit{scored[i].entry->id, Relevance{scored[i].similarity}});
    }
    return hits;
}

bool VectorIndex::contains(const std::string& event_id) const {
    std::shared_lock lock(mutex_);
    return by_id_.count(event_id) != 0;
}

std::size_t VectorIndex::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

}  // namespace engram

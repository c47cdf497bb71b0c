#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "engram/embedding.hpp"
#include "engram/memory_math.hpp"
#include "engram/vector_index.hpp"

namespace engram {

enum class EventSource { chat, ingest, synthetic };

const char* to_string(EventSource source);
EventSource event_source_from_string(const std::string& name);

// One stored episodic memory: content, embedding, temporal context and
// consolidation state.
struct MemoryEvent {
    std::string id;
    std::string content;
    Embedding embedding;
    std::int64_t created_at = 0;
    ConsolidationState consolidation;
    std::optional<int> importance;  // 1..10, used by the baseline scorer only
    std::vector<std::string> tags;
    EventSource source = EventSource::ingest;
};

// Durable store of MemoryEvents under one directory:
//   events.log     append-only JSONL write-ahead log
//   snapshot.json  full state written by compact()
// Every mutation is logged and flushed before it is acknowledged, so a crash
// after the write is recovered on reopen. Single writer; reads may run
// concurrently with each other but not with writes.
class MemoryStore {
public:
    static constexpr int kFormatVersion = 1;

    // Opens or creates the store at `dir`. An existing store must carry the
    // same embedder fingerprint (model, dimension, hash-seed version).
    MemoryStore(std::filesystem::path dir, std::shared_ptr<Embedder> embedder);

    // Embeds `content` and persists a fresh event (n = 0, g = 1).
    MemoryEvent append_event(const std::string& content, std::int64_t timestamp,
                             std::optional<int> importance = std::nullopt,
                             std::vector<std::string> tags = {},
                             EventSource source = EventSource::ingest);

    // Persists a caller-built event (embedding and consolidation included).
    // Used for replaying benchmark timelines with synthetic embeddings and
    // pre-seeded gradients. An empty id is assigned; all invariants are
    // checked. Returns the stored record.
    MemoryEvent append_event_raw(MemoryEvent event);

    // Applies one recall to the event's consolidation state and persists the
    // new state durably before returning it.
    ConsolidationState record_recall(const std::string& event_id, std::int64_t recall_time,
                                     const TimeScaling& scaling);

    void remove_event(const std::string& event_id);

    // Writes a fresh snapshot and truncates the log.
    void compact();

    bool contains(const std::string& event_id) const;
    MemoryEvent get(const std::string& event_id) const;
    std::vector<MemoryEvent> events() const;  // creation order
    std::size_t size() const;

    // Monotone creation rank of an event (stable across removals of others).
    std::uint64_t creation_seq(const std::string& event_id) const;

    std::vector<VectorIndex::Hit> search(const Embedding& query, std::size_t k) const;

    const EmbedderFingerprint& fingerprint() const { return fingerprint_; }
    Embedder& embedder() { return *embedder_; }
    const std::filesystem::path& directory() const { return dir_; }

    std::filesystem::path log_path() const { return dir_ / "events.log"; }
    std::filesystem::path snapshot_path() const { return dir_ / "snapshot.json"; }

private:
    struct Stored {
        MemoryEvent event;
        std::uint64_t seq = 0;
    };

    void load_or_create();
    void open_log_for_append();
    void write_log_line(const std::string& line);
    void insert_loaded(MemoryEvent event);
    const Stored& stored(const std::string& event_id) const;

    std::filesystem::path dir_;
    std::shared_ptr<Embedder> embedder_;
    EmbedderFingerprint fingerprint_;
    std::ofstream log_;
    std::vector<Stored> events_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::uint64_t next_seq_ = 0;
    VectorIndex index_;
    std::mt19937_64 rng_;
    mutable std::shared_mutex mutex_;
};

}  // namespace engram

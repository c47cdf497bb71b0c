#include "engram/memory_store.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>

#include <json.hpp>

#include "engram/errors.hpp"
#include "engram/time_utils.hpp"
#include "engram/ulid.hpp"

namespace engram {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(EventSource source) {
    switch (source) {
        case EventSource::chat: return "chat";
        case EventSource::ingest: return "ingest";
        case EventSource::synthetic: return "synthetic";
    }
    return "ingest";
}

EventSource event_source_from_string(const std::string& name) {
    if (name == "chat") return EventSource::chat;
    if (name == "ingest") return EventSource::ingest;
    if (name == "synthetic") return EventSource::synthetic;
    throw ValidationError("unknown event source '" + name + "'");
}

namespace {

ordered_json consolidation_to_json(const ConsolidationState& c) {
    ordered_json out;
    out["n"] = c.n;
    out["g"] = c.g;
    if (c.last_recalled_at) {
        out["last_recalled_at"] = *c.last_recalled_at;
        out["last_recalled_at_iso"] = format_iso8601_utc(*c.last_recalled_at);
    }
    return out;
}

ConsolidationState consolidation_from_json(const json& doc) {
    ConsolidationState c;
    c.n = doc.at("n").get<int>();
    c.g = doc.at("g").get<double>();
    if (doc.contains("last_recalled_at")) {
        c.last_recalled_at = doc.at("last_recalled_at").get<std::int64_t>();
    }
    if (c.n < 0 || !(c.g >= 1.0) || !(c.g <= 1.0 + c.n)) {
        throw ValidationError("consolidation state violates 1 <= g <= 1 + n");
    }
    if ((c.n == 0) != !c.last_recalled_at) {
        throw ValidationError("last_recalled_at must be present exactly when n > 0");
    }
    return c;
}

ordered_json event_to_json(const MemoryEvent& event) {
    ordered_json out;
    out["id"] = event.id;
    out["content"] = event.content;
    out["created_at"] = event.created_at;
    out["created_at_iso"] = format_iso8601_utc(event.created_at);
    out["source"] = to_string(event.source);
    if (event.importance) out["importance"] = *event.importance;
    out["tags"] = event.tags;
    out["consolidation"] = consolidation_to_json(event.consolidation);
    out["embedding"] = ordered_json{{"model_id", event.embedding.model_id},
                                    {"values", event.embedding.values}};
    return out;
}

MemoryEvent event_from_json(const json& doc) {
    MemoryEvent event;
    event.id = doc.at("id").get<std::string>();
    event.content = doc.at("content").get<std::string>();
    event.created_at = doc.at("created_at").get<std::int64_t>();
    event.source = event_source_from_string(doc.at("source").get<std::string>());
    if (doc.contains("importance")) event.importance = doc.at("importance").get<int>();
    if (doc.contains("tags")) event.tags = doc.at("tags").get<std::vector<std::string>>();
    event.consolidation = consolidation_from_json(doc.at("consolidation"));
    const auto& emb = doc.at("embedding");
    event.embedding.model_id = emb.at("model_id").get<std::string>();
    event.embedding.values = emb.at("values").get<std::vector<double>>();
    return event;
}

ordered_json fingerprint_to_json(const EmbedderFingerprint& fp) {
    return ordered_json{{"model_id", fp.model_id},
                        {"dimension", fp.dimension},
                        {"hash_seed_version", fp.hash_seed_version}};
}

EmbedderFingerprint fingerprint_from_json(const json& doc) {
    EmbedderFingerprint fp;
    fp.model_id = doc.at("model_id").get<std::string>();
    fp.dimension = doc.at("dimension").get<std::uint32_t>();
    fp.hash_seed_version = doc.at("hash_seed_version").get<std::uint32_t>();
    return fp;
}

void check_fingerprint(const EmbedderFingerprint& on_disk, const EmbedderFingerprint& configured,
                       const std::string& where) {
    if (on_disk != configured) {
        throw FingerprintMismatchError(
            where + " was written with embedder " + on_disk.describe() +
            " but the configured embedder is " + configured.describe() +
            "; re-embed the corpus (re-ingest the events) or restore the matching embedder config");
    }
}

void validate_event(const MemoryEvent& event, const EmbedderFingerprint& fp) {
    if (event.content.empty()) {
        throw ValidationError("event content must be non-empty");
    }
    if (event.created_at < 0) {
        throw ValidationError("event timestamp must be >= 0");
    }
    if (event.importance && (*event.importance < 1 || *event.importance > 10)) {
        throw ValidationError("importance must be in [1, 10]");
    }
    if (event.embedding.dimension() != fp.dimension) {
        throw ValidationError("event embedding dimension " +
                              std::to_string(event.embedding.dimension()) +
                              " does not match store dimension " + std::to_string(fp.dimension));
    }
    if (event.embedding.model_id != fp.model_id) {
        throw ValidationError("event embedding model '" + event.embedding.model_id +
                              "' does not match store model '" + fp.model_id + "'");
    }
    double norm_sq = 0.0;
    for (double v : event.embedding.values) norm_sq += v * v;
    if (std::fabs(std::sqrt(norm_sq) - 1.0) > 1e-6) {
        throw ValidationError("event embedding must be unit length");
    }
    const auto& c = event.consolidation;
    if (c.n < 0 || !(c.g >= 1.0) || !(c.g <= 1.0 + c.n)) {
        throw ValidationError("consolidation state violates 1 <= g <= 1 + n");
    }
    if ((c.n == 0) != !c.last_recalled_at) {
        throw ValidationError("last_recalled_at must be present exactly when n > 0");
    }
    if (c.last_recalled_at && *c.last_recalled_at < event.created_at) {
        throw ValidationError("last_recalled_at precedes event creation");
    }
}

}  // namespace

MemoryStore::MemoryStore(std::filesystem::path dir, std::shared_ptr<Embedder> embedder)
    : dir_(std::move(dir)),
      embedder_(std::move(embedder)),
      fingerprint_(embedder_->fingerprint()),
      index_(fingerprint_.dimension),
      rng_(std::random_device{}()) {
    load_or_create();
}

void MemoryStore::load_or_create() {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
        throw IoError("cannot create store directory " + dir_.string() + ": " + ec.message());
    }

    if (std::filesystem::exists(snapshot_path())) {
        std::ifstream in(snapshot_path());
        if (!in) throw IoError("cannot open " + snapshot_path().string());
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw IoError("snapshot " + snapshot_path().string() + " is corrupt: " + e.what());
        }
        if (doc.value("format_version", -1) != kFormatVersion) {
            throw IoError("snapshot format_version " +
                          std::to_string(doc.value("format_version", -1)) +
                          " is not supported (expected " + std::to_string(kFormatVersion) + ")");
        }
        check_fingerprint(fingerprint_from_json(doc.at("embedder")), fingerprint_,
                          "snapshot " + snapshot_path().string());
        for (const auto& event_doc : doc.at("events")) {
            insert_loaded(event_from_json(event_doc));
        }
    }

    if (std::filesystem::exists(log_path())) {
        std::ifstream in(log_path());
        if (!in) throw IoError("cannot open " + log_path().string());
        std::string line;
        std::size_t line_number = 0;
        std::int64_t offset = 0;
        bool saw_header = false;
        while (std::getline(in, line)) {
            ++line_number;
            const std::int64_t line_offset = offset;
            offset += static_cast<std::int64_t>(line.size()) + 1;
            const auto fail = [&](const std::string& why) -> CorruptLogError {
                return CorruptLogError("corrupt record in " + log_path().string() + " at line " +
                                           std::to_string(line_number) + " (byte offset " +
                                           std::to_string(line_offset) + "): " + why,
                                       line_number, line_offset);
            };
            json record;
            try {
                record = json::parse(line);
            } catch (const json::exception& e) {
                throw fail(e.what());
            }
            try {
                const std::string type = record.at("type").get<std::string>();
                if (type == "header") {
                    if (record.value("format_version", -1) != kFormatVersion) {
                        throw IoError("log format_version " +
                                      std::to_string(record.value("format_version", -1)) +
                                      " is not supported");
                    }
                    check_fingerprint(fingerprint_from_json(record.at("embedder")), fingerprint_,
                                      "log " + log_path().string());
                    saw_header = true;
                } else if (type == "event") {
                    if (!saw_header) throw fail("event record before header");
                    insert_loaded(event_from_json(record.at("event")));
                } else if (type == "recall") {
                    if (!saw_header) throw fail("recall record before header");
                    const auto id = record.at("event_id").get<std::string>();
                    const auto it = by_id_.find(id);
                    if (it == by_id_.end()) throw fail("recall of unknown event '" + id + "'");
                    auto& event = events_[it->second].event;
                    const auto state = consolidation_from_json(record.at("consolidation"));
                    if (state.g < event.consolidation.g) {
                        throw fail("recall record decreases gradient of '" + id + "'");
                    }
                    event.consolidation = state;
                } else if (type == "remove") {
                    const auto id = record.at("event_id").get<std::string>();
                    const auto it = by_id_.find(id);
                    if (it == by_id_.end()) throw fail("removal of unknown event '" + id + "'");
                    const std::size_t pos = it->second;
                    index_.remove(id);
                    events_.erase(events_.begin() + static_cast<std::ptrdiff_t>(pos));
                    by_id_.erase(it);
                    for (auto& [eid, idx] : by_id_) {
                        if (idx > pos) --idx;
                    }
                } else {
                    throw fail("unknown record type '" + type + "'");
                }
            } catch (const json::exception& e) {
                throw fail(e.what());
            }
        }
        if (!saw_header && line_number > 0) {
            throw CorruptLogError("log " + log_path().string() + " has no header record", 1, 0);
        }
    } else {
        std::ofstream out(log_path(), std::ios::app);
        if (!out) throw IoError("cannot create " + log_path().string());
        ordered_json header{{"type", "header"},
                            {"format_version", kFormatVersion},
                            {"embedder", fingerprint_to_json(fingerprint_)}};
        out << header.dump() << '\n';
        out.flush();
        if (!out) throw IoError("cannot write log header to " + log_path().string());
    }

    open_log_for_append();
}

void MemoryStore::open_log_for_append() {
    log_.open(log_path(), std::ios::app);
    if (!log_) {
        throw IoError("cannot open " + log_path().string() + " for append");
    }
}

void MemoryStore::write_log_line(const std::string& line) {
    log_ << line << '\n';
    log_.flush();
    if (!log_) {
        throw IoError("write to " + log_path().string() + " failed");
    }
}

void MemoryStore::insert_loaded(MemoryEvent event) {
    validate_event(event, fingerprint_);
    if (by_id_.count(event.id) != 0) {
        throw ValidationError("duplicate event id '" + event.id + "' in store");
    }
    index_.insert(event.id, event.embedding);
    by_id_.emplace(event.id, events_.size());
    events_.push_back(Stored{std::move(event), next_seq_++});
}

MemoryEvent MemoryStore::append_event(const std::string& content, std::int64_t timestamp,
                                      std::optional<int> importance,
                                      std::vector<std::string> tags, EventSource source) {
    MemoryEvent event;
    event.content = content;
    event.created_at = timestamp;
    event.importance = importance;
    event.tags = std::move(tags);
    event.source = source;
    if (content.empty()) {
        throw ValidationError("event content must be non-empty");
    }
    event.embedding = embedder_->embed(content);
    return append_event_raw(std::move(event));
}

MemoryEvent MemoryStore::append_event_raw(MemoryEvent event) {
    std::unique_lock lock(mutex_);
    if (event.id.empty()) {
        do {
            event.id = make_ulid(event.created_at * 1000, rng_);
        } while (by_id_.count(event.id) != 0);
    } else if (by_id_.count(event.id) != 0) {
        throw ValidationError("duplicate event id '" + event.id + "'");
    }
    validate_event(event, fingerprint_);

    const ordered_json record{{"type", "event"}, {"event", event_to_json(event)}};
    write_log_line(record.dump());

    index_.insert(event.id, event.embedding);
    by_id_.emplace(event.id, events_.size());
    events_.push_back(Stored{event, next_seq_++});
    return event;
}

ConsolidationState MemoryStore::record_recall(const std::string& event_id,
                                              std::int64_t recall_time,
                                              const TimeScaling& scaling) {
    std::unique_lock lock(mutex_);
    const auto it = by_id_.find(event_id);
    if (it == by_id_.end()) {
        throw ValidationError("record_recall: unknown event id '" + event_id + "'");
    }
    auto& event = events_[it->second].event;
    const ConsolidationState next =
        update_gradient(event.consolidation, event.created_at, recall_time, scaling);

    ordered_json record{{"type", "recall"},
                        {"event_id", event_id},
                        {"consolidation", consolidation_to_json(next)}};
    write_log_line(record.dump());

    event.consolidation = next;
    return next;
}

void MemoryStore::remove_event(const std::string& event_id) {
    std::unique_lock lock(mutex_);
    const auto it = by_id_.find(event_id);
    if (it == by_id_.end()) {
        throw ValidationError("remove_event: unknown event id '" + event_id + "'");
    }
    const ordered_json record{{"type", "remove"}, {"event_id", event_id}};
    write_log_line(record.dump());

    const std::size_t pos = it->second;
    index_.remove(event_id);
    events_.erase(events_.begin() + static_cast<std::ptrdiff_t>(pos));
    by_id_.erase(it);
    for (auto& [id, idx] : by_id_) {
        if (idx > pos) --idx;
    }
}

void MemoryStore::compact() {
    std::unique_lock lock(mutex_);
    ordered_json snapshot;
    snapshot["format_version"] = kFormatVersion;
    snapshot["embedder"] = fingerprint_to_json(fingerprint_);
    auto& events = snapshot["events"] = ordered_json::array();
    for (const auto& stored : events_) {
        events.push_back(event_to_json(stored.event));
    }

    const auto tmp = snapshot_path().string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out << snapshot.dump(2) << '\n';
        out.flush();
        if (!out) throw IoError("write to " + tmp + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, snapshot_path(), ec);
    if (ec) {
        throw IoError("cannot replace snapshot: " + ec.message());
    }

    log_.close();
    {
        std::ofstream out(log_path(), std::ios::trunc);
        if (!out) throw IoError("cannot truncate " + log_path().string());
        ordered_json header{{"type", "header"},
                            {"format_version", kFormatVersion},
                            {"embedder", fingerprint_to_json(fingerprint_)}};
        out << header.dump() << '\n';
        out.flush();
        if (!out) throw IoError("cannot write log header to " + log_path().string());
    }
    open_log_for_append();
}

bool MemoryStore::contains(const std::string& event_id) const {
    std::shared_lock lock(mutex_);
    return by_id_.count(event_id) != 0;
}

const MemoryStore::Stored& MemoryStore::stored(const std::string& event_id) const {
    const auto it = by_id_.find(event_id);
    if (it == by_id_.end()) {
        throw ValidationError("unknown event id '" + event_id + "'");
    }
    return events_[it->second];
}

MemoryEvent MemoryStore::get(const std::string& event_id) const {
    std::shared_lock lock(mutex_);
    return stored(event_id).event;
}

std::vector<MemoryEvent> MemoryStore::events() const {
    std::shared_lock lock(mutex_);
    std::vector<MemoryEvent> out;
    out.reserve(events_.size());
    for (const auto& stored : events_) out.push_back(stored.event);
    return out;
}

std::size_t MemoryStore::size() const {
    std::shared_lock lock(mutex_);
    return events_.size();
}

std::uint64_t MemoryStore::creation_seq(const std::string& event_id) const {
    std::shared_lock lock(mutex_);
    return stored(event_id).seq;
}

std::vector<VectorIndex::Hit> MemoryStore::search(const Embedding& query, std::size_t k) const {
    std::shared_lock lock(mutex_);
    return index_.search(query, k);
}

}  // namespace engram

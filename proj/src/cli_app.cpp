#include "engram/cli_app.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "engram/embedding.hpp"
#include "engram/errors.hpp"
#include "engram/eval_harness.hpp"
#include "engram/llm_client.hpp"
#include "engram/memory_store.hpp"
#include "engram/recall_engine.hpp"
#include "engram/time_utils.hpp"

#ifdef _WIN32
#else
#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#endif

namespace engram::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Advisory lock on the store directory; one process at a time.
class StoreLock {
public:
    explicit StoreLock(const fs::path& dir) {
#ifndef _WIN32
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw IoError("cannot create store directory " + dir.string() + ": " + ec.message());
        }
        const fs::path lock_path = dir / "LOCK";
        fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) {
            throw IoError("cannot open lock file " + lock_path.string());
        }
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw IoError("store " + dir.string() + " is locked by another process");
        }
#else
        (void)dir;
#endif
    }

    ~StoreLock() {
#ifndef _WIN32
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
#endif
    }

    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

private:
    int fd_ = -1;
};

struct GlobalOptions {
    std::string store_dir;
    std::string format = "text";
    double threshold = 0.86;
    std::string policy = "argmax-and-threshold";
    int candidate_k = 10;
    double tau_decay = 31'536'000.0;
    double tau_s = 86'400.0;
    std::string scorer = "proposed";
    std::string embedder_kind = "local";
    std::size_t dimension = 256;
    std::string embed_endpoint;
    std::string embed_model_id;
    std::string embed_auth_env;
    int embed_timeout_ms = 5000;
};

EngineConfig engine_config_from(const GlobalOptions& options) {
    EngineConfig config;
    config.threshold = options.threshold;
    config.trigger_policy = trigger_policy_from_string(options.policy);
    config.candidate_k = options.candidate_k;
    config.scaling.decay_unit_seconds = options.tau_decay;
    config.scaling.consolidation_unit_seconds = options.tau_s;
    config.scorer = scorer_from_string(options.scorer);
    validate_engine_config(config);
    return config;
}

EmbedderConfig embedder_config_from(const GlobalOptions& options) {
    EmbedderConfig config;
    if (options.embedder_kind == "local") {
        config.kind = EmbedderConfig::Kind::local_hash;
    } else if (options.embedder_kind == "remote") {
        config.kind = EmbedderConfig::Kind::remote;
        if (options.embed_endpoint.empty()) {
            throw ValidationError("--embedder remote requires --embed-endpoint");
        }
    } else {
        throw ValidationError("unknown embedder '" + options.embedder_kind +
                              "' (expected local or remote)");
    }
    config.dimension = options.dimension;
    config.endpoint_url = options.embed_endpoint;
    config.model_id = options.embed_model_id;
    config.auth_token_env_var = options.embed_auth_env;
    config.timeout_ms = options.embed_timeout_ms;
    return config;
}

fs::path resolve_store_dir(const GlobalOptions& options) {
    if (!options.store_dir.empty()) return options.store_dir;
    if (const char* env = std::getenv("ENGRAM_STORE")) {
        if (*env != '\0') return env;
    }
    return "engram-store";
}

std::shared_ptr<MemoryStore> open_store(const GlobalOptions& options) {
    return std::make_shared<MemoryStore>(resolve_store_dir(options),
                                         make_embedder(embedder_config_from(options)));
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt(const char* format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, value);
    return buf;
}

ordered_json candidate_to_json(const ScoredCandidate& candidate) {
    return ordered_json{{"event_id", candidate.event_id},
                        {"content", candidate.content},
                        {"score", candidate.score},
                        {"relevance", candidate.relevance.value},
                        {"elapsed_seconds", candidate.elapsed_seconds},
                        {"gradient", candidate.gradient},
                        {"importance_used", candidate.importance_used},
                        {"elapsed_clamped", candidate.elapsed_clamped}};
}

ordered_json outcome_to_json(const RecallOutcome& outcome, const EngineConfig& config) {
    ordered_json doc;
    doc["query_time"] = outcome.query_time;
    doc["query_time_iso"] = format_iso8601_utc(outcome.query_time);
    doc["policy"] = to_string(config.trigger_policy);
    doc["threshold"] = config.threshold;
    doc["scorer"] = to_string(config.scorer);
    if (outcome.recalled) {
        auto recalled = candidate_to_json(outcome.recalled->scored);
        recalled["created_at_iso"] = format_iso8601_utc(outcome.recalled->event.created_at);
        recalled["n_after_recall"] = outcome.recalled->event.consolidation.n;
        recalled["g_after_recall"] = outcome.recalled->event.consolidation.g;
        doc["recalled"] = std::move(recalled);
    } else {
        doc["recalled"] = nullptr;
    }
    auto& list = doc["candidates"] = ordered_json::array();
    for (const auto& candidate : outcome.candidates) {
        list.push_back(candidate_to_json(candidate));
    }
    return doc;
}

void print_candidate_table(std::ostream& out, const RecallOutcome& outcome) {
    out << "  rank    score  relevance  elapsed_s     grad  recalled  content\n";
    const std::string* recalled_id =
        outcome.recalled ? &outcome.recalled->scored.event_id : nullptr;
    for (std::size_t i = 0; i < outcome.candidates.size(); ++i) {
        const auto& c = outcome.candidates[i];
        char line[160];
        std::snprintf(line, sizeof(line), "  %4zu  %7.3f  %9.3f  %9.0f  %7.3f", i + 1, c.score,
                      c.relevance.value, c.elapsed_seconds, c.gradient);
        out << line << "     " << (recalled_id && *recalled_id == c.event_id ? '*' : ' ') << "    "
            << c.content << '\n';
    }
}

void print_clamp_warnings(std::ostream& out, const RecallOutcome& outcome) {
    for (const auto& candidate : outcome.candidates) {
        if (candidate.elapsed_clamped) {
            out << "warning: '" << candidate.content
                << "' is dated after the query time; elapsed clamped to 0\n";
        }
    }
}

int cmd_add(const GlobalOptions& options, std::ostream& out, const std::string& content,
            const std::string& time_text, int importance, const std::string& tags_csv) {
    std::optional<int> importance_opt;
    if (importance != 0) {
        if (importance < 1 || importance > 10) {
            throw ValidationError("importance must be in [1, 10], got " +
                                  std::to_string(importance));
        }
        importance_opt = importance;
    }
    const std::int64_t timestamp =
        time_text.empty() ? now_epoch_seconds() : parse_time(time_text);
    if (timestamp < 0) {
        throw ValidationError("event time must be >= epoch 0");
    }

    const fs::path dir = resolve_store_dir(options);
    StoreLock lock(dir);
    auto store = open_store(options);
    const MemoryEvent event =
        store->append_event(content, timestamp, importance_opt, split_csv(tags_csv));

    if (options.format == "json") {
        ordered_json doc{{"id", event.id},
                         {"created_at", event.created_at},
                         {"created_at_iso", format_iso8601_utc(event.created_at)},
                         {"n", event.consolidation.n},
                         {"g", event.consolidation.g},
                         {"tags", event.tags},
                         {"source", to_string(event.source)}};
        if (event.importance) doc["importance"] = *event.importance;
        out << doc.dump() << '\n';
    } else {
        out << "added " << event.id << "\n  created_at: " << format_iso8601_utc(event.created_at)
            << "\n  n: 0  g: " << fmt("%.3f", event.consolidation.g) << '\n';
    }
    return 0;
}

int cmd_list(const GlobalOptions& options, std::ostream& out, std::size_t limit) {
    const fs::path dir = resolve_store_dir(options);
    StoreLock lock(dir);
    auto store = open_store(options);
    auto events = store->events();
    if (limit > 0 && events.size() > limit) {
        events.erase(events.begin(), events.end() - static_cast<std::ptrdiff_t>(limit));
    }
    if (options.format == "json") {
        ordered_json list = ordered_json::array();
        for (const auto& event : events) {
            ordered_json doc{{"id", event.id},
                             {"content", event.content},
                             {"created_at", event.created_at},
                             {"created_at_iso", format_iso8601_utc(event.created_at)},
                             {"n", event.consolidation.n},
                             {"g", event.consolidation.g},
                             {"tags", event.tags},
                             {"source", to_string(event.source)},
                             {"embedding_dimension", event.embedding.dimension()}};
            if (event.importance) doc["importance"] = *event.importance;
            if (event.consolidation.last_recalled_at) {
                doc["last_recalled_at"] = *event.consolidation.last_recalled_at;
                doc["last_recalled_at_iso"] =
                    format_iso8601_utc(*event.consolidation.last_recalled_at);
            }
            list.push_back(std::move(doc));
        }
        out << list.dump() << '\n';
    } else {
        for (const auto& event : events) {
            out << event.id << "  " << format_iso8601_utc(event.created_at)
                << "  n=" << event.consolidation.n << "  g=" << fmt("%.3f", event.consolidation.g);
            if (event.importance) out << "  imp=" << *event.importance;
            out << "  [" << to_string(event.source) << "]  " << event.content << '\n';
        }
        out << events.size() << " event(s)\n";
    }
    return 0;
}

int cmd_remove(const GlobalOptions& options, std::ostream& out, const std::string& event_id) {
    const fs::path dir = resolve_store_dir(options);
    StoreLock lock(dir);
    auto store = open_store(options);
    store->remove_event(event_id);
    if (options.format == "json") {
        out << ordered_json{{"removed", event_id}}.dump() << '\n';
    } else {
        out << "removed " << event_id << '\n';
    }
    return 0;
}

int cmd_recall(const GlobalOptions& options, std::ostream& out, const std::string& query,
               const std::string& now_text, bool explain, bool dry_run) {
    const EngineConfig config = engine_config_from(options);
    const std::int64_t now = now_text.empty() ? now_epoch_seconds() : parse_time(now_text);

    const fs::path dir = resolve_store_dir(options);
    StoreLock lock(dir);
    RecallEngine engine(open_store(options), config);
    const RecallOutcome outcome =
        dry_run ? engine.recall_dry_run(query, now) : engine.recall(query, now);

    if (options.format == "json") {
        out << outcome_to_json(outcome, config).dump() << '\n';
        return 0;
    }

    print_clamp_warnings(out, outcome);
    if (outcome.recalled) {
        const auto& scored = outcome.recalled->scored;
        out << "recalled: " << scored.content << '\n'
            << "  created " << format_iso8601_utc(outcome.recalled->event.created_at)
            << "  score=" << fmt("%.3f", scored.score)
            << "  relevance=" << fmt("%.3f", scored.relevance.value)
            << "  elapsed_s=" << fmt("%.0f", scored.elapsed_seconds)
            << "  g=" << fmt("%.3f", scored.gradient) << '\n';
    } else if (outcome.candidates.empty()) {
        out << "no recall (store is empty)\n";
    } else {
        out << "no recall (best score " << fmt("%.3f", outcome.candidates.front().score)
            << " below threshold " << fmt("%.3f", config.threshold) << ")\n";
    }
    if (explain && !outcome.candidates.empty()) {
        print_candidate_table(out, outcome);
    }
    return 0;
}

int cmd_replay(const GlobalOptions& options, std::ostream& out, const std::string& dataset_path,
               const std::string& task_id) {
    const EvalDataset dataset = load_dataset(dataset_path);
    const EvalTask* task = nullptr;
    if (task_id.empty()) {
        if (dataset.tasks.size() != 1) {
            std::string ids;
            for (const auto& t : dataset.tasks) ids += (ids.empty() ? "" : ", ") + t.task_id;
            throw ValidationError("dataset has " + std::to_string(dataset.tasks.size()) +
                                  " tasks; pick one with --task (" + ids + ")");
        }
        task = &dataset.tasks.front();
    } else {
        for (const auto& t : dataset.tasks) {
            if (t.task_id == task_id) task = &t;
        }
        if (task == nullptr) {
            throw ValidationError("task '" + task_id + "' not found in dataset");
        }
    }

    const fs::path dir = resolve_store_dir(options);
    StoreLock lock(dir);
    auto store = open_store(options);
    if (store->size() != 0) {
        throw ValidationError("replay needs an empty store; " + dir.string() + " has " +
                              std::to_string(store->size()) + " events");
    }

    const Embedding query_embedding = store->embedder().embed(task->query);
    std::uint64_t variant = 0;
    for (const auto& eval_event : task->events) {
        MemoryEvent event;
        event.content = eval_event.content;
        event.created_at = eval_event.timestamp;
        event.importance = eval_event.importance;
        event.tags = {eval_event.label};
        event.source = EventSource::synthetic;
        if (eval_event.relevance) {
            event.embedding =
                embedding_with_relevance_to(query_embedding, *eval_event.relevance, variant++);
        } else {
            event.embedding = store->embedder().embed(eval_event.content);
        }
        const double gradient = eval_event.gradient.value_or(1.0);
        event.consolidation.g = gradient;
        event.consolidation.n =
            static_cast<int>(std::max(0.0, std::ceil(gradient - 1.0 - 1e-9)));
        if (event.consolidation.n > 0) {
            event.consolidation.last_recalled_at = event.created_at;
        }
        store->append_event_raw(std::move(event));
    }

    if (options.format == "json") {
        out << ordered_json{{"task_id", task->task_id},
                            {"events_added", task->events.size()},
                            {"query", task->query},
                            {"query_time", task->query_time}}
                   .dump()
            << '\n';
    } else {
        out << "replayed task '" << task->task_id << "' (" << task->events.size()
            << " events) into " << dir.string() << '\n'
            << "score it with:\n  engram --store " << dir.string() << " recall \"" << task->query
            << "\" --now " << task->query_time << " --dry-run --explain\n";
    }
    return 0;
}

int cmd_bench(const GlobalOptions& options, std::ostream& out, const std::string& dataset_path,
              const std::string& models_csv, const std::string& report_out,
              const std::string& text_out) {
    const EvalDataset dataset = load_dataset(dataset_path);
    std::vector<ScorerKind> models;
    for (const auto& name : split_csv(models_csv)) {
        models.push_back(scorer_from_string(name));
    }
    const EngineConfig config = engine_config_from(options);
    auto embedder = make_embedder(embedder_config_from(options));
    const EvalReport report = run_benchmark(dataset, models, config, *embedder);

    const std::string json_text = report_to_json(report).dump(2) + "\n";
    const std::string text = report_to_text(report);
    if (!report_out.empty()) {
        std::ofstream file(report_out, std::ios::trunc | std::ios::binary);
        if (!file) throw IoError("cannot write report to " + report_out);
        file << json_text;
        if (!file) throw IoError("write to " + report_out + " failed");
    }
    if (!text_out.empty()) {
        std::ofstream file(text_out, std::ios::trunc | std::ios::binary);
        if (!file) throw IoError("cannot write report to " + text_out);
        file << text;
        if (!file) throw IoError("write to " + text_out + " failed");
    }
    out << (options.format == "json" ? json_text : text);
    return 0;
}

int cmd_chat(const GlobalOptions& options, std::istream& in, std::ostream& out,
             const std::string& username, const std::string& llm_endpoint,
             const std::string& llm_stub, const std::string& now_text,
             const std::string& transcript_path, bool explain) {
    if (llm_endpoint.empty() == llm_stub.empty()) {
        throw ValidationError("chat needs exactly one of --llm-endpoint or --llm-stub");
    }
    if (username.empty()) {
        throw ValidationError("--user must be non-empty");
    }
    std::unique_ptr<LlmClient> client;
    if (!llm_endpoint.empty()) {
        LlmConfig llm_config;
        llm_config.endpoint_url = llm_endpoint;
        llm_config.auth_token_env_var = "ENGRAM_LLM_TOKEN";
        client = std::make_unique<HttpLlmClient>(llm_config);
    } else {
        client = std::make_unique<ScriptedLlmClient>(ScriptedLlmClient::from_file(llm_stub));
    }

    const bool fixed_clock = !now_text.empty();
    const std::int64_t base_time = fixed_clock ? parse_time(now_text) : now_epoch_seconds();

    const EngineConfig config = engine_config_from(options);
    const fs::path dir = resolve_store_dir(options);
    StoreLock lock(dir);
    RecallEngine engine(open_store(options), config);

    std::ofstream transcript;
    if (!transcript_path.empty()) {
        transcript.open(transcript_path, std::ios::trunc);
        if (!transcript) throw IoError("cannot write transcript to " + transcript_path);
    }

    std::string line;
    int turn_index = 0;
    while (out << "you> " << std::flush, std::getline(in, line)) {
        if (line.empty()) continue;
        // A fixed clock advances 30 s per turn so replayed sessions stay
        // deterministic while still showing the passage of time.
        const std::int64_t now =
            fixed_clock ? base_time + 30 * turn_index : now_epoch_seconds();
        const ChatTurn turn = engine.chat_turn(line, username, now, *client);
        ++turn_index;

        if (options.format == "json") {
            ordered_json doc{{"turn", turn_index},
                             {"time", now},
                             {"user", line},
                             {"user_event_id", turn.user_event_id}};
            doc["reply"] = turn.reply ? ordered_json(*turn.reply) : ordered_json(nullptr);
            doc["llm_error"] = turn.llm_error ? ordered_json(*turn.llm_error) : ordered_json(nullptr);
            doc["recalled"] = turn.outcome.recalled
                                  ? candidate_to_json(turn.outcome.recalled->scored)
                                  : ordered_json(nullptr);
            out << doc.dump() << '\n';
            if (transcript) transcript << doc.dump() << '\n';
            continue;
        }

        std::ostringstream rendered;
        if (explain && turn.outcome.recalled) {
            const auto& scored = turn.outcome.recalled->scored;
            rendered << "(recalled: \"" << scored.content << "\" from "
                     << format_iso8601_utc(turn.outcome.recalled->event.created_at) << ", score "
                     << fmt("%.3f", scored.score) << ")\n";
        }
        if (turn.reply) {
            rendered << "agent> " << *turn.reply << '\n';
        } else {
            rendered << "error: " << *turn.llm_error << '\n';
            rendered << "(the turn was stored; the reply failed)\n";
        }
        out << rendered.str();
        if (transcript) {
            transcript << "you> " << line << '\n' << rendered.str();
            transcript.flush();
        }
    }
    out << '\n';
    return 0;
}

int cmd_compact(const GlobalOptions& options, std::ostream& out) {
    const fs::path dir = resolve_store_dir(options);
    StoreLock lock(dir);
    auto store = open_store(options);
    store->compact();
    if (options.format == "json") {
        out << ordered_json{{"compacted", store->size()}}.dump() << '\n';
    } else {
        out << "compacted " << store->size() << " event(s)\n";
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"engram - memory recall and consolidation engine for dialogue agents"};
    app.require_subcommand(1);

    GlobalOptions options;
    app.add_option("--store", options.store_dir,
                   "Store directory (default: $ENGRAM_STORE or ./engram-store)");
    app.add_option("--format", options.format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--threshold", options.threshold, "Recall trigger threshold k");
    app.add_option("--policy", options.policy,
                   "Trigger policy: threshold-only, argmax-only, argmax-and-threshold");
    app.add_option("--candidates", options.candidate_k, "Candidates fetched per recall");
    app.add_option("--tau-decay", options.tau_decay, "Seconds per decay time unit");
    app.add_option("--tau-s", options.tau_s, "Seconds per consolidation time unit");
    app.add_option("--scorer", options.scorer, "Scoring model: proposed or baseline");
    app.add_option("--embedder", options.embedder_kind, "Embedder: local or remote");
    app.add_option("--dimension", options.dimension, "Embedding dimension");
    app.add_option("--embed-endpoint", options.embed_endpoint, "Remote embedding endpoint URL");
    app.add_option("--embed-model-id", options.embed_model_id, "Declared remote model id");
    app.add_option("--embed-auth-env", options.embed_auth_env,
                   "Env var holding the embedding bearer token");
    app.add_option("--embed-timeout-ms", options.embed_timeout_ms, "Remote embedding timeout");

    auto* add = app.add_subcommand("add", "Store a new memory event");
    std::string add_content, add_time, add_tags;
    int add_importance = 0;
    add->add_option("content", add_content, "Event text")->required();
    add->add_option("--time", add_time, "Event time (epoch seconds or ISO-8601; default: now)");
    add->add_option("--importance", add_importance, "Importance 1-10 for the baseline scorer");
    add->add_option("--tags", add_tags, "Comma-separated tags");

    auto* list = app.add_subcommand("list", "List stored events in creation order");
    std::size_t list_limit = 0;
    list->add_option("--limit", list_limit, "Show only the most recent N events");

    auto* remove = app.add_subcommand("remove", "Remove an event by id");
    std::string remove_id;
    remove->add_option("id", remove_id, "Event id")->required();

    auto* recall = app.add_subcommand("recall", "Run one recall cycle against the store");
    std::string recall_query, recall_now;
    bool recall_explain = false, recall_dry = false;
    recall->add_option("query", recall_query, "Query text")->required();
    recall->add_option("--now", recall_now, "Query time (epoch seconds or ISO-8601)");
    recall->add_flag("--explain", recall_explain, "Print the full scored candidate table");
    recall->add_flag("--dry-run", recall_dry, "Score without consolidating");

    auto* replay = app.add_subcommand("replay",
                                      "Load one benchmark task into an empty store as a timeline");
    std::string replay_dataset, replay_task;
    replay->add_option("dataset", replay_dataset, "Dataset JSON path")->required();
    replay->add_option("--task", replay_task, "Task id (required for multi-task datasets)");

    auto* bench = app.add_subcommand("bench", "Run a benchmark dataset and report losses");
    std::string bench_dataset, bench_models = "proposed,baseline";
    std::string bench_report_out, bench_text_out;
    bench->add_option("dataset", bench_dataset, "Dataset JSON path")->required();
    bench->add_option("--models", bench_models, "Comma-separated models to compare");
    bench->add_option("--report-out", bench_report_out, "Write the JSON report here");
    bench->add_option("--text-out", bench_text_out, "Write the text report here");

    auto* chat = app.add_subcommand("chat", "Interactive chat with memory recall");
    std::string chat_user = "user", chat_endpoint, chat_stub, chat_now, chat_transcript;
    bool chat_explain = false;
    chat->add_option("--user", chat_user, "Username substituted into the prompts");
    chat->add_option("--llm-endpoint", chat_endpoint, "Chat completion endpoint URL");
    chat->add_option("--llm-stub", chat_stub, "Scripted LLM stub JSON file");
    chat->add_option("--now", chat_now,
                     "Fixed session start time; each turn advances 30 s (default: wall clock)");
    chat->add_option("--transcript", chat_transcript, "Append the session transcript to a file");
    chat->add_flag("--explain", chat_explain, "Show the recalled memory per turn");

    auto* compact = app.add_subcommand("compact", "Write a snapshot and truncate the log");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("engram");
    for (const auto& arg : args) argv.push_back(arg.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (add->parsed()) {
            return cmd_add(options, out, add_content, add_time, add_importance, add_tags);
        }
        if (list->parsed()) {
            return cmd_list(options, out, list_limit);
        }
        if (remove->parsed()) {
            return cmd_remove(options, out, remove_id);
        }
        if (recall->parsed()) {
            return cmd_recall(options, out, recall_query, recall_now, recall_explain, recall_dry);
        }
        if (replay->parsed()) {
            return cmd_replay(options, out, replay_dataset, replay_task);
        }
        if (bench->parsed()) {
            return cmd_bench(options, out, bench_dataset, bench_models, bench_report_out,
                             bench_text_out);
        }
        if (chat->parsed()) {
            return cmd_chat(options, in, out, chat_user, chat_endpoint, chat_stub, chat_now,
                            chat_transcript, chat_explain);
        }
        if (compact->parsed()) {
            return cmd_compact(options, out);
        }
        err << "error: no command given\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::validation: return 2;
            case ErrorKind::io: return 3;
            case ErrorKind::remote: return 4;
        }
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace engram::cli

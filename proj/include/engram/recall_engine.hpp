#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "engram/llm_client.hpp"
#include "engram/memory_math.hpp"
#include "engram/memory_store.hpp"

namespace engram {

// When a candidate's score triggers an actual recall:
//   threshold_only       recall the best candidate whose score reaches the
//                        threshold (the plain threshold-trigger reading)
//   argmax_only          always recall the best candidate
//   argmax_and_threshold recall the best candidate only if it reaches the
//                        threshold (default)
// threshold_only and argmax_and_threshold select the same event whenever they
// recall at all; only one memory is ever recalled per query.
enum class TriggerPolicy { threshold_only, argmax_only, argmax_and_threshold };

enum class ScorerKind { proposed, baseline };

const char* to_string(ScorerKind kind);
ScorerKind scorer_from_string(const std::string& name);
const char* to_string(TriggerPolicy policy);
TriggerPolicy trigger_policy_from_string(const std::string& name);

struct EngineConfig {
    double threshold = 0.86;
    TriggerPolicy trigger_policy = TriggerPolicy::argmax_and_threshold;
    int candidate_k = 10;
    TimeScaling scaling;
    BaselineWeights baseline;
    ScorerKind scorer = ScorerKind::proposed;
};

// Default importance assumed by the baseline scorer when an event carries
// none (midpoint of the 1..10 scale).
inline constexpr int kDefaultImportance = 5;

// Throws ValidationError when threshold or candidate_k are out of range.
void validate_engine_config(const EngineConfig& config);

// One scored retrieval candidate with the inputs that produced the score.
struct ScoredCandidate {
    std::string event_id;
    std::string content;
    double score = 0.0;
    Relevance relevance;          // raw cosine similarity, before flooring
    double elapsed_seconds = 0.0;
    double gradient = 1.0;
    int importance_used = kDefaultImportance;
    bool elapsed_clamped = false;  // query_time preceded the event's creation
};

struct RecalledMemory {
    MemoryEvent event;       // state after the consolidation update
    ScoredCandidate scored;  // values as they were at scoring time
};

struct RecallOutcome {
    std::optional<RecalledMemory> recalled;
    std::vector<ScoredCandidate> candidates;  // descending by score
    std::int64_t query_time = 0;
};

struct PromptBundle {
    std::string agent_prompt;
    std::string system_prompt;
    std::optional<std::string> recalled_context;
};

struct ChatTurn {
    RecallOutcome outcome;
    PromptBundle prompts;
    std::string user_event_id;
    std::optional<std::string> reply;
    std::optional<std::string> llm_error;
};

// Scores one memory the way the configured model would. The proposed scorer
// floors negative relevance to zero; the baseline uses it as-is.
double score_memory(Relevance relevance, double elapsed_seconds, double gradient, int importance,
                    ScorerKind scorer, const EngineConfig& config);

// Runs the recall cycle: embed query, search candidates, score, apply the
// trigger policy, consolidate the recalled memory. One cycle at a time per
// store; scoring-only paths are reentrant.
class RecallEngine {
public:
    explicit RecallEngine(std::shared_ptr<MemoryStore> store, EngineConfig config = {});

    // Scores the top candidate_k events and, when the trigger policy fires,
    // records the recall (exactly one consolidation update, for the returned
    // event only).
    RecallOutcome recall(const std::string& query, std::int64_t now);

    // Same scoring and selection, but never consolidates.
    RecallOutcome recall_dry_run(const std::string& query, std::int64_t now);

    // Pure scoring of the given events against a query embedding; no store
    // access, no mutation. Events must share the store's embedder fingerprint.
    std::vector<ScoredCandidate> score_candidates(const Embedding& query_embedding,
                                                  std::span<const MemoryEvent> events,
                                                  std::int64_t now) const;

    // Substitutes the username and the ISO-8601 rendering of `now` into the
    // agent/system prompt templates and attaches the recalled memory, when
    // present, as context.
    static PromptBundle build_prompt(const RecallOutcome& outcome, const std::string& username,
                                     std::int64_t now);

    // One conversation turn: recall, build prompts, call the LLM, and append
    // the user turn as a chat-source event. Recall and append are committed
    // even when the LLM call fails; the failure is reported in `llm_error`.
    ChatTurn chat_turn(const std::string& user_text, const std::string& username,
                       std::int64_t now, LlmClient& llm);

    const EngineConfig& config() const { return config_; }
    MemoryStore& store() { return *store_; }

private:
    RecallOutcome run_recall(const std::string& query, std::int64_t now, bool consolidate);
    ScoredCandidate score_one(const MemoryEvent& event, Relevance relevance,
                              std::int64_t now) const;

    std::shared_ptr<MemoryStore> store_;
    EngineConfig config_;
    std::mutex recall_mutex_;
};

}  // namespace engram

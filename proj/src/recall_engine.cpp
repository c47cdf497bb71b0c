#include "engram/recall_engine.hpp"

#include <algorithm>

#include "engram/errors.hpp"
#include "engram/time_utils.hpp"

namespace engram {

namespace {

constexpr const char* kAgentPromptTemplate =
    "You are a \"temporal cognition\" specialized AI agent with the same memory structure as "
    "humans; you are caring and charming, understand self.username better than anyone else. "
    "Keep the conversation going by asking yourself contextual questions and sparking "
    "discussion to show your interest in self.username.";

constexpr const char* kSystemPromptTemplate =
    "Based on self.username's schedule and current time: current.time, subtly guide the "
    "conversation to a context that conveys to self.username that you have a sense of time. "
    "Always output a simple short response.";

std::string replace_all(std::string text, const std::string& needle,
                        const std::string& replacement) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), replacement);
        pos += replacement.size();
    }
    return text;
}

}  // namespace

void validate_engine_config(const EngineConfig& config) {
    if (config.candidate_k < 1) {
        throw ValidationError("candidate_k must be >= 1");
    }
    if (!(config.threshold > 0.0) || !(config.threshold <= 1.0)) {
        throw ValidationError("threshold must lie in (0, 1]");
    }
    if (!(config.scaling.decay_unit_seconds > 0.0) ||
        !(config.scaling.consolidation_unit_seconds > 0.0)) {
        throw ValidationError("time scaling constants must be positive");
    }
}

const char* to_string(ScorerKind kind) {
    return kind == ScorerKind::proposed ? "proposed" : "baseline";
}

ScorerKind scorer_from_string(const std::string& name) {
    if (name == "proposed") return ScorerKind::proposed;
    if (name == "baseline") return ScorerKind::baseline;
    throw ValidationError("unknown scorer '" + name + "' (expected proposed or baseline)");
}

const char* to_string(TriggerPolicy policy) {
    switch (policy) {
        case TriggerPolicy::threshold_only: return "threshold-only";
        case TriggerPolicy::argmax_only: return "argmax-only";
        case TriggerPolicy::argmax_and_threshold: return "argmax-and-threshold";
    }
    return "argmax-and-threshold";
}

TriggerPolicy trigger_policy_from_string(const std::string& name) {
    if (name == "threshold-only") return TriggerPolicy::threshold_only;
    if (name == "argmax-only") return TriggerPolicy::argmax_only;
    if (name == "argmax-and-threshold") return TriggerPolicy::argmax_and_threshold;
    throw ValidationError("unknown trigger policy '" + name + "'");
}

double score_memory(Relevance relevance, double elapsed_seconds, double gradient, int importance,
                    ScorerKind scorer, const EngineConfig& config) {
    if (scorer == ScorerKind::proposed) {
        const Relevance floored{std::max(relevance.value, 0.0)};
        return recall_probability(floored, elapsed_seconds, gradient, config.scaling);
    }
    return baseline_score(relevance, elapsed_seconds, importance, config.baseline);
}

RecallEngine::RecallEngine(std::shared_ptr<MemoryStore> store, EngineConfig config)
    : store_(std::move(store)), config_(config) {
    validate_engine_config(config_);
}

ScoredCandidate RecallEngine::score_one(const MemoryEvent& event, Relevance relevance,
                                        std::int64_t now) const {
    ScoredCandidate candidate;
    candidate.event_id = event.id;
    candidate.content = event.content;
    candidate.relevance = relevance;
    candidate.elapsed_clamped = now < event.created_at;
    candidate.elapsed_seconds =
        candidate.elapsed_clamped ? 0.0 : static_cast<double>(now - event.created_at);
    candidate.gradient = event.consolidation.g;
    candidate.importance_used = event.importance.value_or(kDefaultImportance);
    candidate.score = score_memory(relevance, candidate.elapsed_seconds, candidate.gradient,
                                   candidate.importance_used, config_.scorer, config_);
    return candidate;
}

RecallOutcome RecallEngine::run_recall(const std::string& query, std::int64_t now,
                                       bool consolidate) {
    RecallOutcome outcome;
    outcome.query_time = now;
    if (store_->size() == 0) {
        return outcome;
    }

    const Embedding query_embedding = store_->embedder().embed(query);
    const auto hits = store_->search(query_embedding, static_cast<std::size_t>(config_.candidate_k));

    struct Ranked {
        ScoredCandidate candidate;
        std::uint64_t seq;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(hits.size());
    for (const auto& hit : hits) {
        const MemoryEvent event = store_->get(hit.event_id);
        ranked.push_back({score_one(event, hit.relevance, now), store_->creation_seq(hit.event_id)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.candidate.score != b.candidate.score) return a.candidate.score > b.candidate.score;
        if (a.seq != b.seq) return a.seq < b.seq;
        return a.candidate.event_id < b.candidate.event_id;
    });
    outcome.candidates.reserve(ranked.size());
    for (auto& r : ranked) outcome.candidates.push_back(std::move(r.candidate));

    const ScoredCandidate& best = outcome.candidates.front();
    bool triggered = false;
    switch (config_.trigger_policy) {
        case TriggerPolicy::argmax_only:
            triggered = true;
            break;
        case TriggerPolicy::threshold_only:
        case TriggerPolicy::argmax_and_threshold:
            triggered = best.score >= config_.threshold;
            break;
    }
    if (!triggered) {
        return outcome;
    }

    if (consolidate) {
        store_->record_recall(best.event_id, now, config_.scaling);
    }
    outcome.recalled = RecalledMemory{store_->get(best.event_id), best};
    return outcome;
}

RecallOutcome RecallEngine::recall(const std::string& query, std::int64_t now) {
    std::lock_guard lock(recall_mutex_);
    validate_engine_config(config_);
    return run_recall(query, now, true);
}

RecallOutcome RecallEngine::recall_dry_run(const std::string& query, std::int64_t now) {
    std::lock_guard lock(recall_mutex_);
    validate_engine_config(config_);
    return run_recall(query, now, false);
}

std::vector<ScoredCandidate> RecallEngine::score_candidates(const Embedding& query_embedding,
                                                            std::span<const MemoryEvent> events,
                                                            std::int64_t now) const {
    const auto& fp = store_->fingerprint();
    if (query_embedding.dimension() != fp.dimension || query_embedding.model_id != fp.model_id) {
        throw ValidationError("query embedding does not match the store fingerprint " +
                              fp.describe());
    }
    std::vector<ScoredCandidate> scored;
    scored.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& event = events[i];
        if (event.embedding.dimension() != fp.dimension ||
            event.embedding.model_id != fp.model_id) {
            throw ValidationError("event '" + event.id + "' does not match the store fingerprint " +
                                  fp.describe());
        }
        const Relevance relevance =
            cosine_similarity(query_embedding.values, event.embedding.values);
        scored.push_back(score_one(event, relevance, now));
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const ScoredCandidate& a, const ScoredCandidate& b) {
                         return a.score > b.score;
                     });
    return scored;
}

PromptBundle RecallEngine::build_prompt(const RecallOutcome& outcome, const std::string& username,
                                        std::int64_t now) {
    if (username.empty()) {
        throw ValidationError("username must be non-empty");
    }
    PromptBundle bundle;
    const std::string time_text = format_iso8601_utc(now);
    bundle.agent_prompt = replace_all(kAgentPromptTemplate, "self.username", username);
    bundle.system_prompt = replace_all(
        replace_all(kSystemPromptTemplate, "self.username", username), "current.time", time_text);
    if (outcome.recalled) {
        const auto& event = outcome.recalled->event;
        bundle.recalled_context = "Recalled memory from " + format_iso8601_utc(event.created_at) +
                                  ": " + event.content;
    }
    return bundle;
}

ChatTurn RecallEngine::chat_turn(const std::string& user_text, const std::string& username,
                                 std::int64_t now, LlmClient& llm) {
    if (user_text.empty()) {
        throw ValidationError("chat turn text must be non-empty");
    }
    ChatTurn turn;
    turn.outcome = recall(user_text, now);
    turn.prompts = build_prompt(turn.outcome, username, now);
    // The user turn becomes a memory regardless of what the LLM does next.
    turn.user_event_id =
        store_->append_event(user_text, now, std::nullopt, {}, EventSource::chat).id;

    LlmRequest request;
    request.system = turn.prompts.agent_prompt;
    request.messages.push_back({"system", turn.prompts.system_prompt});
    if (turn.prompts.recalled_context) {
        request.messages.push_back({"system", *turn.prompts.recalled_context});
    }
    request.messages.push_back({"user", user_text});
    try {
        turn.reply = llm.complete(request);
    } catch (const RemoteError& e) {
        turn.llm_error = e.what();
    }
    return turn;
}

}  // namespace engram

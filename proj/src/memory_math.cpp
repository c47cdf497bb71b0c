#include "engram/memory_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "engram/errors.hpp"

namespace engram {

namespace {

void check_scaling(const TimeScaling& scaling) {
    if (!(scaling.decay_unit_seconds > 0.0) || !std::isfinite(scaling.decay_unit_seconds)) {
        throw ValidationError("decay_unit_seconds must be positive and finite");
    }
    if (!(scaling.consolidation_unit_seconds > 0.0) ||
        !std::isfinite(scaling.consolidation_unit_seconds)) {
        throw ValidationError("consolidation_unit_seconds must be positive and finite");
    }
}

void check_weights(const BaselineWeights& w) {
    if (w.w_recency < 0.0 || w.w_importance < 0.0 || w.w_relevance < 0.0) {
        throw ValidationError("baseline weights must be non-negative");
    }
    if (w.w_recency == 0.0 && w.w_importance == 0.0 && w.w_relevance == 0.0) {
        throw ValidationError("at least one baseline weight must be positive");
    }
    if (!(w.recency_decay_per_hour > 0.0) || !(w.recency_decay_per_hour < 1.0)) {
        throw ValidationError("recency_decay_per_hour must lie in (0, 1)");
    }
    if (!(w.importance_scale > 0.0)) {
        throw ValidationError("importance_scale must be positive");
    }
}

void check_importance(int importance) {
    if (importance < 1 || importance > 10) {
        throw ValidationError("importance must be in [1, 10], got " + std::to_string(importance));
    }
}

}  // namespace

Relevance cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || a.size() != b.size()) {
        throw ValidationError("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw ValidationError("cosine_similarity: zero-norm input");
    }
    const double value = dot / (std::sqrt(na) * std::sqrt(nb));
    return Relevance{std::clamp(value, -1.0, 1.0)};
}

double recall_probability(Relevance r, double elapsed_seconds, double gradient,
                          const TimeScaling& scaling) {
    check_scaling(scaling);
    if (!(r.value >= 0.0) || !(r.value <= 1.0)) {
        throw ValidationError("recall_probability: relevance must be in [0, 1]");
    }
    if (!(elapsed_seconds >= 0.0)) {
        throw ValidationError("recall_probability: elapsed time must be non-negative");
    }
    if (!(gradient >= 1.0)) {
        throw ValidationError("recall_probability: gradient must be >= 1");
    }
    const double t = elapsed_seconds / scaling.decay_unit_seconds;
    const double strength = r.value * std::exp(-t / gradient);
    const double p = (1.0 - std::exp(-strength)) / (1.0 - std::exp(-1.0));
    return std::clamp(p, 0.0, 1.0);
}

double consolidation_increment(double inter_recall_seconds, const TimeScaling& scaling) {
    check_scaling(scaling);
    if (!(inter_recall_seconds >= 0.0)) {
        throw ValidationError("consolidation_increment: interval must be non-negative");
    }
    const double t = inter_recall_seconds / scaling.consolidation_unit_seconds;
    const double e = std::exp(-t);
    return (1.0 - e) / (1.0 + e);
}

ConsolidationState update_gradient(const ConsolidationState& state, std::int64_t created_at,
                                   std::int64_t recall_time, const TimeScaling& scaling) {
    check_scaling(scaling);
    if (state.n < 0 || !(state.g >= 1.0)) {
        throw ValidationError("update_gradient: invalid consolidation state");
    }
    if (state.last_recalled_at && recall_time < *state.last_recalled_at) {
        throw ClockRegressionError("recall at " + std::to_string(recall_time) +
                                   " precedes previous recall at " +
                                   std::to_string(*state.last_recalled_at));
    }
    const std::int64_t anchor = state.last_recalled_at ? *state.last_recalled_at : created_at;
    const double dt =
        recall_time > anchor ? static_cast<double>(recall_time - anchor) : 0.0;
    ConsolidationState next;
    next.n = state.n + 1;
    next.g = state.g + consolidation_increment(dt, scaling);
    next.last_recalled_at = std::max(recall_time, anchor);
    return next;
}

double baseline_score(Relevance r, double elapsed_seconds, int importance,
                      const BaselineWeights& weights) {
    check_weights(weights);
    check_importance(importance);
    if (!(elapsed_seconds >= 0.0)) {
        throw ValidationError("baseline_score: elapsed time must be non-negative");
    }
    const double hours = elapsed_seconds / 3600.0;
    const double recency = std::pow(weights.recency_decay_per_hour, hours);
    return weights.w_relevance * r.value +
           weights.w_importance * (importance / weights.importance_scale) +
           weights.w_recency * recency;
}

std::vector<double> min_max_normalize(std::span<const double> values) {
    if (values.empty()) {
        throw ValidationError("min_max_normalize: empty input");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(values.size(), 0.0);
    if (hi > lo) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out[i] = (values[i] - lo) / (hi - lo);
        }
    }
    return out;
}

std::vector<double> baseline_scores_min_max(std::span<const double> relevances,
                                            std::span<const double> elapsed_seconds,
                                            std::span<const int> importances,
                                            const BaselineWeights& weights) {
    check_weights(weights);
    if (relevances.size() != elapsed_seconds.size() || relevances.size() != importances.size()) {
        throw ValidationError("baseline_scores_min_max: component lists differ in length");
    }
    std::vector<double> recency(relevances.size());
    std::vector<double> importance(relevances.size());
    for (std::size_t i = 0; i < relevances.size(); ++i) {
        check_importance(importances[i]);
        if (!(elapsed_seconds[i] >= 0.0)) {
            throw ValidationError("baseline_scores_min_max: elapsed time must be non-negative");
        }
        recency[i] = std::pow(weights.recency_decay_per_hour, elapsed_seconds[i] / 3600.0);
        importance[i] = static_cast<double>(importances[i]);
    }
    const auto rel = min_max_normalize(relevances);
    const auto rec = min_max_normalize(recency);
    const auto imp = min_max_normalize(importance);
    std::vector<double> out(relevances.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = weights.w_relevance * rel[i] + weights.w_importance * imp[i] +
                 weights.w_recency * rec[i];
    }
    return out;
}

}  // namespace engram

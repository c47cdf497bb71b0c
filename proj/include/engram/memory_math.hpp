#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace engram {

// Cosine similarity between two embeddings, in [-1, 1].
struct Relevance {
    double value = 0.0;
};

// Per-memory consolidation state: recall count n and decay gradient g. The
// memory's decay rate is the reciprocal 1/g, so larger g means slower
// forgetting. g starts at 1 and grows by strictly less than 1 per recall, so
// 1 <= g <= 1 + n holds throughout. last_recalled_at is absent while n == 0.
struct ConsolidationState {
    int n = 0;
    double g = 1.0;
    std::optional<std::int64_t> last_recalled_at;
};

// Converts wall-clock seconds into the unitless time of the decay and
// consolidation curves. Defaults: one year per decay unit, one day per
// consolidation unit, so a memory keeps most of its recall probability over
// weeks while recalls spaced days apart each consolidate close to fully.
struct TimeScaling {
    double decay_unit_seconds = 31'536'000.0;
    double consolidation_unit_seconds = 86'400.0;
};

// Weighted recency/importance/relevance sum used by the comparison scorer.
struct BaselineWeights {
    double w_recency = 1.0;
    double w_importance = 1.0;
    double w_relevance = 1.0;
    double recency_decay_per_hour = 0.995;
    double importance_scale = 10.0;
};

// a . b / (|a| |b|), clamped to [-1, 1]. Throws ValidationError on dimension
// mismatch or a zero-norm input.
Relevance cosine_similarity(std::span<const double> a, std::span<const double> b);

// Normalized recall probability
//     p_n(t) = (1 - exp(-r * e^{-t/g})) / (1 - e^{-1})
// with t = elapsed_seconds / scaling.decay_unit_seconds. Requires r in [0, 1]
// (callers floor negative similarities first), elapsed >= 0 and g >= 1.
// p_n(r=1, t=0) == 1 exactly; increasing in r and g, non-increasing in t.
double recall_probability(Relevance r, double elapsed_seconds, double gradient,
                          const TimeScaling& scaling);

// Consolidation step S(t) = (1 - e^{-t}) / (1 + e^{-t}) in [0, 1), with
// t = inter_recall_seconds / scaling.consolidation_unit_seconds. S(0) = 0 and
// S saturates toward 1, so each recall strengthens by at most one unit.
double consolidation_increment(double inter_recall_seconds, const TimeScaling& scaling);

// Applies one recall to a consolidation state: n+1 and g + S(dt), where dt is
// the time since the previous recall, or since creation for the first recall.
// A recall_time before the anchor clamps dt to zero (future-dated memories);
// a recall_time before the previous recall throws ClockRegressionError.
ConsolidationState update_gradient(const ConsolidationState& state, std::int64_t created_at,
                                   std::int64_t recall_time, const TimeScaling& scaling);

// Comparison scorer:
//   w_relevance * r + w_importance * importance/scale + w_recency * decay^hours.
// importance must be in [1, 10]; elapsed_seconds must be >= 0.
double baseline_score(Relevance r, double elapsed_seconds, int importance,
                      const BaselineWeights& weights);

// Affine rescale to [0, 1]. A constant (max == min) input maps to all zeros.
// Throws ValidationError on an empty list.
std::vector<double> min_max_normalize(std::span<const double> values);

// Min-max variant of the baseline: each component is normalized across the
// candidate set before the weighted sum. Provided for comparison; the raw sum
// above is the default because it reproduces the reference ranking.
std::vector<double> baseline_scores_min_max(std::span<const double> relevances,
                                            std::span<const double> elapsed_seconds,
                                            std::span<const int> importances,
                                            const BaselineWeights& weights);

}  // namespace engram

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "engram/errors.hpp"
#include "engram/memory_math.hpp"
#include "support/generators.hpp"

using namespace engram;
using engram::test::uniform;
using engram::test::uniform_int;

namespace {

const TimeScaling kDefaultScaling{};

// Reference evaluation of the recall-probability formula, kept separate from
// the library path so table rows are checked against plain arithmetic.
double reference_recall_probability(double r, double elapsed_seconds, double g,
                                    double decay_unit) {
    const double t = elapsed_seconds / decay_unit;
    return (1.0 - std::exp(-r * std::exp(-t / g))) / (1.0 - std::exp(-1.0));
}

}  // namespace

TEST_CASE("cosine similarity basics") {
    const std::vector<double> v{0.6, 0.8};
    CHECK(cosine_similarity(v, v).value == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> e1{1.0, 0.0};
    const std::vector<double> e2{0.0, 1.0};
    CHECK(cosine_similarity(e1, e2).value == doctest::Approx(0.0).epsilon(1e-12));

    // dot = 8, |a| = |b| = 3
    const std::vector<double> a{1.0, 2.0, 2.0};
    const std::vector<double> b{2.0, 1.0, 2.0};
    CHECK(cosine_similarity(a, b).value == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("cosine similarity rejects bad input") {
    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{1.0, 0.0, 0.0};
    const std::vector<double> zero{0.0, 0.0};
    const std::vector<double> empty;
    CHECK_THROWS_AS((void)cosine_similarity(a, b), ValidationError);
    CHECK_THROWS_AS((void)cosine_similarity(a, zero), ValidationError);
    CHECK_THROWS_AS((void)cosine_similarity(empty, empty), ValidationError);
}

TEST_CASE("cosine similarity is symmetric and scale invariant") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t dim = static_cast<std::size_t>(uniform_int(rng, 2, 24));
        std::vector<double> a(dim), b(dim);
        for (auto& x : a) x = uniform(rng, -2.0, 2.0);
        for (auto& x : b) x = uniform(rng, -2.0, 2.0);
        double na = 0.0, nb = 0.0;
        for (double x : a) na += x * x;
        for (double x : b) nb += x * x;
        if (na < 1e-6 || nb < 1e-6) continue;
        const double lambda = uniform(rng, 0.01, 50.0);
        std::vector<double> a_scaled(dim);
        for (std::size_t j = 0; j < dim; ++j) a_scaled[j] = lambda * a[j];

        const double ab = cosine_similarity(a, b).value;
        CHECK(cosine_similarity(b, a).value == doctest::Approx(ab).epsilon(1e-12));
        CHECK(cosine_similarity(a_scaled, b).value == doctest::Approx(ab).epsilon(1e-9));
        CHECK(ab >= -1.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("recall probability anchors") {
    // r = 1, t = 0 is the normalization anchor: exactly 1.
    CHECK(recall_probability(Relevance{1.0}, 0.0, 1.0, kDefaultScaling) == 1.0);
    // r = 0 collapses the numerator.
    CHECK(recall_probability(Relevance{0.0}, 12345.0, 3.0, kDefaultScaling) == 0.0);
}

TEST_CASE("recall probability matches the reference table rows") {
    // Relevance/time/gradient rows with expected scores 0.850, 0.830, 0.836,
    // 0.836 (tolerance 0.01 against the reference rounding).
    struct Row {
        double r, seconds, g, reference;
    };
    const Row rows[] = {
        {0.776, 434700.0, 5.102, 0.850},
        {0.745, 148800.0, 5.229, 0.830},
        {0.757, 331500.0, 5.028, 0.836},
        {0.756, 55800.0, 1.000, 0.836},
    };
    for (const auto& row : rows) {
        const double p = recall_probability(Relevance{row.r}, row.seconds, row.g, kDefaultScaling);
        CHECK(std::fabs(p - row.reference) < 0.01);
        CHECK(p == doctest::Approx(reference_recall_probability(
                       row.r, row.seconds, row.g, kDefaultScaling.decay_unit_seconds))
                       .epsilon(1e-12));
    }
    // The first row is the argmax of the four.
    const double a = recall_probability(Relevance{0.776}, 434700.0, 5.102, kDefaultScaling);
    const double b = recall_probability(Relevance{0.745}, 148800.0, 5.229, kDefaultScaling);
    const double c = recall_probability(Relevance{0.757}, 331500.0, 5.028, kDefaultScaling);
    const double d = recall_probability(Relevance{0.756}, 55800.0, 1.000, kDefaultScaling);
    CHECK(a > b);
    CHECK(a > c);
    CHECK(a > d);
}

TEST_CASE("recall probability rejects out-of-domain input") {
    CHECK_THROWS_AS((void)recall_probability(Relevance{-0.1}, 0.0, 1.0, kDefaultScaling),
                    ValidationError);
    CHECK_THROWS_AS((void)recall_probability(Relevance{1.1}, 0.0, 1.0, kDefaultScaling),
                    ValidationError);
    CHECK_THROWS_AS((void)recall_probability(Relevance{0.5}, -1.0, 1.0, kDefaultScaling),
                    ValidationError);
    CHECK_THROWS_AS((void)recall_probability(Relevance{0.5}, 0.0, 0.5, kDefaultScaling),
                    ValidationError);
    CHECK_THROWS_AS((void)recall_probability(Relevance{0.5}, 0.0, 1.0, TimeScaling{0.0, 1.0}),
                    ValidationError);
}

TEST_CASE("recall probability bounds and monotonicity (property)") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double r = uniform(rng, 0.0, 1.0);
        const double elapsed = uniform(rng, 0.0, 5.0 * kDefaultScaling.decay_unit_seconds);
        const double g = uniform(rng, 1.0, 12.0);
        const double p = recall_probability(Relevance{r}, elapsed, g, kDefaultScaling);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);

        const double dr = uniform(rng, 1e-6, 1.0 - r + 1e-6);
        const double r2 = std::min(1.0, r + dr);
        if (r2 > r) {
            CHECK(recall_probability(Relevance{r2}, elapsed, g, kDefaultScaling) > p);
        }
        const double later = elapsed + uniform(rng, 0.0, kDefaultScaling.decay_unit_seconds);
        CHECK(recall_probability(Relevance{r}, later, g, kDefaultScaling) <= p + 1e-15);
        const double g2 = g + uniform(rng, 0.0, 5.0);
        CHECK(recall_probability(Relevance{r}, elapsed, g2, kDefaultScaling) >= p - 1e-15);
        // With positive relevance and elapsed time, more consolidation means a
        // strictly higher score.
        if (r > 0.01 && elapsed > 1000.0 && g2 > g + 1e-9) {
            CHECK(recall_probability(Relevance{r}, elapsed, g2, kDefaultScaling) > p);
        }
    }
}

TEST_CASE("consolidation increment") {
    CHECK(consolidation_increment(0.0, kDefaultScaling) == 0.0);
    // One consolidation unit: (1 - e^-1) / (1 + e^-1).
    const double expected = (1.0 - std::exp(-1.0)) / (1.0 + std::exp(-1.0));
    CHECK(consolidation_increment(kDefaultScaling.consolidation_unit_seconds, kDefaultScaling) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.46212).epsilon(1e-4));
    // Saturation.
    CHECK(consolidation_increment(1e6 * kDefaultScaling.consolidation_unit_seconds,
                                  kDefaultScaling) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS((void)consolidation_increment(-1.0, kDefaultScaling), ValidationError);

    // Monotone, in [0, 1). The strict upper bound is checked inside the
    // representable regime; far beyond it S rounds to 1.0 exactly.
    std::mt19937_64 rng(11);
    double prev_t = 0.0, prev_s = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double t = prev_t + uniform(rng, 0.0, 2000.0);
        const double s = consolidation_increment(t, kDefaultScaling);
        CHECK(s >= prev_s);
        CHECK(s >= 0.0);
        CHECK(s < 1.0);
        prev_t = t;
        prev_s = s;
    }
}

TEST_CASE("update_gradient counts and saturates") {
    ConsolidationState fresh;
    // First recall long after creation: S saturates, g ~ 2.
    const auto after = update_gradient(fresh, 0, 400LL * 86400, kDefaultScaling);
    CHECK(after.n == 1);
    CHECK(after.g == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(after.last_recalled_at == 400LL * 86400);

    // Second recall at the identical timestamp adds S(0) = 0.
    const auto repeated = update_gradient(after, 0, 400LL * 86400, kDefaultScaling);
    CHECK(repeated.n == 2);
    CHECK(repeated.g == after.g);

    // Clock regression.
    CHECK_THROWS_AS((void)update_gradient(after, 0, 399LL * 86400, kDefaultScaling),
                    ClockRegressionError);
}

TEST_CASE("update_gradient on a future-dated memory clamps to creation") {
    ConsolidationState fresh;
    const std::int64_t created = 1'000'000;
    const auto state = update_gradient(fresh, created, created - 5000, kDefaultScaling);
    CHECK(state.n == 1);
    CHECK(state.g == 1.0);  // S(0)
    CHECK(state.last_recalled_at == created);
}

TEST_CASE("five well-spaced recalls approach g = 6") {
    ConsolidationState state;
    const std::int64_t created = 0;
    std::int64_t t = created;
    double expected_g = 1.0;
    for (int i = 0; i < 5; ++i) {
        t += static_cast<std::int64_t>(10.0 * kDefaultScaling.consolidation_unit_seconds);
        expected_g += consolidation_increment(
            10.0 * kDefaultScaling.consolidation_unit_seconds, kDefaultScaling);
        state = update_gradient(state, created, t, kDefaultScaling);
    }
    CHECK(state.n == 5);
    CHECK(state.g == doctest::Approx(expected_g).epsilon(1e-12));
    CHECK(state.g == doctest::Approx(6.0).epsilon(1e-3));
}

TEST_CASE("gradient recurrence bounds (property)") {
    std::mt19937_64 rng(23);
    int total_steps = 0;
    while (total_steps < 1000) {
        ConsolidationState state;
        const std::int64_t created = uniform_int(rng, 0, 1'000'000);
        std::int64_t now = created;
        const int steps = uniform_int(rng, 1, 8);
        double prev_g = state.g;
        for (int i = 0; i < steps; ++i) {
            now += uniform_int(rng, 0, 3 * 86400);
            state = update_gradient(state, created, now, kDefaultScaling);
            ++total_steps;
            CHECK(state.g >= prev_g);
            CHECK(state.g >= 1.0);
            CHECK(state.g <= 1.0 + state.n);
            prev_g = state.g;
        }
        CHECK(state.n == steps);
    }
}

TEST_CASE("baseline score reproduces the reference ranking") {
    const BaselineWeights weights{};
    // Elapsed 15.5 h, importance 5, relevance 0.756:
    // 0.756 + 0.5 + 0.995^15.5 = 2.1812...
    const double d = baseline_score(Relevance{0.756}, 55800.0, 5, weights);
    const double expected_d = 0.756 + 0.5 + std::pow(0.995, 55800.0 / 3600.0);
    CHECK(d == doctest::Approx(expected_d).epsilon(1e-12));
    CHECK(d == doctest::Approx(2.181).epsilon(1e-3));

    const double a = baseline_score(Relevance{0.776}, 434700.0, 7, weights);
    const double b = baseline_score(Relevance{0.745}, 148800.0, 2, weights);
    const double c = baseline_score(Relevance{0.757}, 331500.0, 5, weights);
    // Reference order: D > A > C > B.
    CHECK(d > a);
    CHECK(a > c);
    CHECK(c > b);

    // All components maxed out with default weights.
    CHECK(baseline_score(Relevance{1.0}, 0.0, 10, weights) ==
          doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("baseline score validation") {
    const BaselineWeights weights{};
    CHECK_THROWS_AS((void)baseline_score(Relevance{0.5}, 0.0, 0, weights), ValidationError);
    CHECK_THROWS_AS((void)baseline_score(Relevance{0.5}, 0.0, 11, weights), ValidationError);
    CHECK_THROWS_AS((void)baseline_score(Relevance{0.5}, -5.0, 5, weights), ValidationError);
    BaselineWeights zero{};
    zero.w_recency = zero.w_importance = zero.w_relevance = 0.0;
    CHECK_THROWS_AS((void)baseline_score(Relevance{0.5}, 0.0, 5, zero), ValidationError);
}

TEST_CASE("min-max normalization") {
    const std::vector<double> simple{2.0, 4.0, 6.0};
    const auto normalized = min_max_normalize(simple);
    CHECK(normalized[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normalized[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normalized[2] == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> constant{5.0, 5.0, 5.0};
    const auto degenerate = min_max_normalize(constant);
    for (double v : degenerate) CHECK(v == 0.0);

    const std::vector<double> scores{0.850, 0.830, 0.836, 0.836};
    const auto table = min_max_normalize(scores);
    CHECK(table[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(table[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(table[2] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(table[3] == doctest::Approx(0.3).epsilon(1e-9));

    CHECK_THROWS_AS((void)min_max_normalize(std::vector<double>{}), ValidationError);
}

TEST_CASE("min-max normalization is invariant to positive affine transforms (property)") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 1000; ++i) {
        const int n = uniform_int(rng, 2, 12);
        std::vector<double> values(static_cast<std::size_t>(n));
        for (auto& v : values) v = uniform(rng, -50.0, 50.0);
        const double scale = uniform(rng, 0.01, 25.0);
        const double shift = uniform(rng, -100.0, 100.0);
        std::vector<double> transformed(values.size());
        for (std::size_t j = 0; j < values.size(); ++j) {
            transformed[j] = scale * values[j] + shift;
        }
        const auto base = min_max_normalize(values);
        const auto affine = min_max_normalize(transformed);
        for (std::size_t j = 0; j < values.size(); ++j) {
            CHECK(affine[j] == doctest::Approx(base[j]).epsilon(1e-9));
            CHECK(base[j] >= 0.0);
            CHECK(base[j] <= 1.0);
        }
    }
}

TEST_CASE("min-max baseline variant") {
    const BaselineWeights weights{};
    const std::vector<double> relevances{0.776, 0.745, 0.757, 0.756};
    const std::vector<double> elapsed{434700.0, 148800.0, 331500.0, 55800.0};
    const std::vector<int> importances{7, 2, 5, 5};
    const auto scores = baseline_scores_min_max(relevances, elapsed, importances, weights);
    REQUIRE(scores.size() == 4);
    // Max relevance + max importance still loses to max recency here; the
    // most recent event keeps the lead under these weights.
    CHECK(scores[3] > scores[1]);
    for (double s : scores) {
        CHECK(s >= 0.0);
        CHECK(s <= 3.0);
    }
    CHECK_THROWS_AS(
        (void)baseline_scores_min_max(relevances, elapsed, std::vector<int>{1, 2}, weights),
        ValidationError);
}

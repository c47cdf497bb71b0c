#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "engram/errors.hpp"
#include "engram/stats.hpp"
#include "support/generators.hpp"
#include "support/stats_oracle.hpp"

using namespace engram;
using engram::test::uniform;
using engram::test::uniform_int;

TEST_CASE("t CDF matches the quadrature oracle") {
    for (const double dof : {1.0, 2.0, 4.0, 9.0, 17.0, 30.0}) {
        for (double t = -6.0; t <= 6.0; t += 0.75) {
            CHECK(student_t_cdf(t, dof) ==
                  doctest::Approx(engram::test::oracle_cdf(t, dof)).epsilon(1e-10));
        }
    }
}

TEST_CASE("two-tailed critical values match published tables to 4 decimals") {
    // Standard two-tailed critical values for alpha = 0.05 and 0.01,
    // dof 1..30, tabulated to 4 decimals.
    static const double kCritical05[30] = {
        12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060, 2.2622, 2.2281,
        2.2010,  2.1788, 2.1604, 2.1448, 2.1314, 2.1199, 2.1098, 2.1009, 2.0930, 2.0860,
        2.0796,  2.0739, 2.0687, 2.0639, 2.0595, 2.0555, 2.0518, 2.0484, 2.0452, 2.0423};
    static const double kCritical01[30] = {
        63.6567, 9.9248, 5.8409, 4.6041, 4.0321, 3.7074, 3.4995, 3.3554, 3.2498, 3.1693,
        3.1058,  3.0545, 3.0123, 2.9768, 2.9467, 2.9208, 2.8982, 2.8784, 2.8609, 2.8453,
        2.8314,  2.8188, 2.8073, 2.7969, 2.7874, 2.7787, 2.7707, 2.7633, 2.7564, 2.7500};
    for (int dof = 1; dof <= 30; ++dof) {
        const double crit05 = student_t_critical_two_tailed(0.05, dof);
        const double crit01 = student_t_critical_two_tailed(0.01, dof);
        CHECK(std::fabs(crit05 - kCritical05[dof - 1]) < 5e-5);
        CHECK(std::fabs(crit01 - kCritical01[dof - 1]) < 5e-5);
        // And the frozen table itself agrees with the quadrature oracle.
        CHECK(std::fabs(engram::test::oracle_critical_two_tailed(0.05, dof) -
                        kCritical05[dof - 1]) < 5e-5);
        CHECK(std::fabs(engram::test::oracle_critical_two_tailed(0.01, dof) -
                        kCritical01[dof - 1]) < 5e-5);
    }
}

TEST_CASE("dof 9 critical value is the published 2.26") {
    CHECK(std::fabs(student_t_critical_two_tailed(0.05, 9.0) - 2.262) < 1e-3);
}

TEST_CASE("textbook paired example") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> b{0.0, 0.0, 0.0, 0.0, 0.0};
    const auto result = paired_t_test(a, b);
    CHECK(result.dof == 4);
    CHECK(result.t == doctest::Approx(3.0 / (std::sqrt(2.5) / std::sqrt(5.0))).epsilon(1e-12));
    CHECK(std::fabs(result.t - 4.2426) < 1e-3);
    CHECK(std::fabs(result.p - 0.0132) < 1e-3);
    CHECK(result.p ==
          doctest::Approx(engram::test::oracle_two_tailed_p(result.t, 4.0)).epsilon(1e-9));
    CHECK(result.mean_difference == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(result.ci95_low < 3.0);
    CHECK(result.ci95_high > 3.0);
}

TEST_CASE("degenerate and malformed inputs") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)paired_t_test(a, std::vector<double>{1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS((void)paired_t_test(a, a), ValidationError);  // zero variance
    const std::vector<double> shifted{2.0, 3.0, 4.0};
    CHECK_THROWS_AS((void)paired_t_test(shifted, a), ValidationError);  // constant difference
    CHECK_THROWS_AS((void)paired_t_test(std::vector<double>{1.0}, std::vector<double>{2.0}),
                    ValidationError);
}

TEST_CASE("paired t-test antisymmetry (property)") {
    std::mt19937_64 rng(404);
    for (int i = 0; i < 1000; ++i) {
        const int n = uniform_int(rng, 3, 16);
        std::vector<double> a(static_cast<std::size_t>(n)), b(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            a[j] = uniform(rng, -1.0, 1.0);
            b[j] = uniform(rng, -1.0, 1.0);
        }
        PairedTTestResult ab;
        try {
            ab = paired_t_test(a, b);
        } catch (const ValidationError&) {
            continue;  // astronomically unlikely zero-variance draw
        }
        const auto ba = paired_t_test(b, a);
        CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
        CHECK(ab.dof == ba.dof);
        CHECK(ab.ci95_low <= ab.mean_difference);
        CHECK(ab.ci95_high >= ab.mean_difference);
        CHECK(ab.p >= 0.0);
        CHECK(ab.p <= 1.0);
    }
}

TEST_CASE("p-values agree with the oracle across magnitudes") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 50; ++i) {
        const double dof = uniform_int(rng, 1, 40);
        const double t = uniform(rng, -8.0, 8.0);
        CHECK(student_t_two_tailed_p(t, dof) ==
              doctest::Approx(engram::test::oracle_two_tailed_p(t, dof)).epsilon(1e-9));
    }
}

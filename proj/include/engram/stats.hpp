#pragma once

#include <span>

namespace engram {

// Regularized incomplete beta function I_x(a, b), evaluated with the
// continued-fraction expansion (modified Lentz). Accurate to ~1e-14 for the
// parameter ranges used here.
double regularized_incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

// P(|T| >= |t|) for a two-tailed test.
double student_t_two_tailed_p(double t, double dof);

// Positive critical value c such that P(|T| >= c) == alpha.
double student_t_critical_two_tailed(double alpha, double dof);

struct PairedTTestResult {
    double t = 0.0;
    double p = 1.0;
    int dof = 0;
    double mean_difference = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

// Classic two-tailed paired t-test of a against b (differences a[i] - b[i]).
// Throws ValidationError on length mismatch, fewer than two pairs, or
// zero-variance differences.
PairedTTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace engram

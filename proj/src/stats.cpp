#include "engram/stats.hpp"

#include <cmath>
#include <string>

#include "engram/errors.hpp"

namespace engram {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 3e-15;

// Continued fraction for the incomplete beta function.
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ValidationError("incomplete beta: a and b must be positive");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) {
        throw ValidationError("student_t_cdf: dof must be positive");
    }
    if (t == 0.0) return 0.5;
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_two_tailed_p(double t, double dof) {
    if (!(dof > 0.0)) {
        throw ValidationError("student_t_two_tailed_p: dof must be positive");
    }
    const double x = dof / (dof + t * t);
    return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

double student_t_critical_two_tailed(double alpha, double dof) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ValidationError("student_t_critical_two_tailed: alpha must be in (0, 1)");
    }
    if (!(dof > 0.0)) {
        throw ValidationError("student_t_critical_two_tailed: dof must be positive");
    }
    double hi = 1.0;
    while (student_t_two_tailed_p(hi, dof) > alpha && hi < 1e12) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_two_tailed_p(mid, dof) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

PairedTTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("paired_t_test: sample lengths differ (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) {
        throw ValidationError("paired_t_test: need at least two pairs");
    }
    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    const double variance = ss / static_cast<double>(n - 1);
    if (variance == 0.0) {
        throw ValidationError("paired_t_test: zero-variance differences (degenerate)");
    }
    const double se = std::sqrt(variance / static_cast<double>(n));
    PairedTTestResult result;
    result.dof = static_cast<int>(n) - 1;
    result.t = mean / se;
    result.p = student_t_two_tailed_p(result.t, static_cast<double>(result.dof));
    result.mean_difference = mean;
    const double crit = student_t_critical_two_tailed(0.05, static_cast<double>(result.dof));
    result.ci95_low = mean - crit * se;
    result.ci95_high = mean + crit * se;
    return result;
}

}  // namespace engram

#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>

namespace hotstart {

// Regularised upper incomplete gamma Q(a, x): power series for x < a + 1,
// Lentz continued fraction otherwise.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < kMaxIter; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * kEps) break;
        }
        return std::max(0.0, 1.0 - sum * std::exp(log_prefix));
    }
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(log_prefix) * h;
}

// Upper tail of the chi-square distribution.
inline double chi_square_sf(double statistic, double dof = 1.0) {
    if (statistic <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

// P(X >= k) for X ~ Binomial(n, 1/2).
inline double binomial_upper_tail_half(int k, int n) {
    if (n < 0 || k < 0) throw std::invalid_argument("binomial tail needs non-negative arguments");
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    double p = 0.0;
    for (int i = k; i <= n; ++i)
        p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
    return std::min(1.0, p);
}

struct SignTestResult {
    int wins = 0;    // pairs where the first sample is smaller
    int losses = 0;
    int ties = 0;
    double p_value = 1.0;
};

// One-sided paired sign test of "first < second"; ties are dropped.
template <class Range>
SignTestResult sign_test_less(const Range& first, const Range& second) {
    if (std::size(first) != std::size(second)) throw std::invalid_argument("paired samples differ in length");
    SignTestResult r;
    auto it = std::begin(second);
    for (const auto& a : first) {
        const auto b = *it++;
        if (a < b) ++r.wins;
        else if (a > b) ++r.losses;
        else ++r.ties;
    }
    r.p_value = binomial_upper_tail_half(r.wins, r.wins + r.losses);
    return r;
}

} // namespace hotstart

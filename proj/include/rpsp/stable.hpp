#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

// Numerically stable helpers for probabilities parameterized by
// c = log(1 - g), the per-transmission log survival probability.
// Keeping c instead of g avoids cancellation for g close to 0 and to 1.

namespace rpsp::stable {

// log(1 - e^t) for t <= 0.
inline double log1mexp(double t) {
    constexpr double ln2 = 0.6931471805599453;
    if (t > -ln2) return std::log(-std::expm1(t));
    return std::log1p(-std::exp(t));
}

// log(g) for g = 1 - e^c, c <= 0.
inline double log_g_from_c(double c) { return log1mexp(c); }

// (1 - g^m) / (1 - g) with g = 1 - e^c, c <= 0, m >= 1.
// Equals the geometric series sum_{r=0}^{m-1} g^r; always in [1, m].
inline double geometric_sum(double c, double m) {
    if (c == 0.0) return 1.0;  // g = 0
    const double ec = std::exp(c);
    if (ec == 0.0) return m;  // 1 - g underflowed; the sum is m to within m e^c
    const double t = m * log_g_from_c(c);
    return -std::expm1(t) / ec;
}

// log of the above.
inline double log_geometric_sum(double c, double m) {
    if (c == 0.0) return 0.0;
    if (std::exp(c) == 0.0) return std::log(m);
    const double t = m * log_g_from_c(c);
    return log1mexp(t) - c;
}

// Compensated accumulator; error stays O(eps) regardless of term count.
class KahanSum {
  public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// log(sum exp(v_i)).
inline double log_sum_exp(std::span<const double> v) {
    double m = -HUGE_VAL;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace rpsp::stable

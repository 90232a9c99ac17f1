#pragma once

#include <string>

#include "rpsp/segmentation.hpp"

namespace rpsp {

// Unit of the exponent in the frame-loss probability. p_e is a per-bit rate,
// so `bits` multiplies byte sizes by 8; `bytes` uses the byte count directly.
// The bits convention reproduces the reference mean-transferred-size table
// and is the pinned default.
enum class SizeUnit { bits, bytes };

// Per-transmission frame loss g(x) = 1 - (1 - p_e)^E(x) with
// E(x) = x + lower_header in size_unit.
struct LossModel {
    double bit_error_rate = 0.0;  // p_e in [0, 1)
    double lower_header = 24.0;   // l_h^L, bytes
    SizeUnit size_unit = SizeUnit::bits;

    double exponent(double x) const {
        return (size_unit == SizeUnit::bits) ? 8.0 * (x + lower_header) : x + lower_header;
    }
    // log(1 - g(x)); exact carrier of g for the stable helpers.
    double log_success(double x) const { return exponent(x) * std::log1p(-bit_error_rate); }
};

double loss_prob(const LossModel& loss, double x);

struct RetryPolicy {
    int retry_limit = 7;     // n_RL >= 0; ignored when unlimited
    bool unlimited = false;  // n_RL -> infinity

    static RetryPolicy finite(int n_rl);
    static RetryPolicy infinite() { return RetryPolicy{0, true}; }
};

// Expected transmission attempts h(x, n_RL) = (1 - g^{n_RL+1}) / (1 - g);
// 1 / (1 - g) when unlimited. log_expected_attempts never overflows and is
// the form used for reweighting at extreme p_e.
double expected_attempts(const LossModel& loss, const RetryPolicy& policy, double x);
double log_expected_attempts(const LossModel& loss, const RetryPolicy& policy, double x);

// Pr(delivery | L^(p) = x) = 1 - g^{n_RL+1}; 1 when unlimited and g < 1.
double delivery_prob(const LossModel& loss, const RetryPolicy& policy, double x);

// Transferred-packet size law F^(q): F^(p) reweighted by expected attempts.
struct TransferredPacketDistribution {
    PointMassLaw law;             // support identical to the source F^(p)
    double mean_size = 0.0;       // l^(q)
    double asymptotic_max = 0.0;  // l^(q)_max = l^(p)_max
    double mean_attempts = 1.0;   // E[R+1]; +inf if it overflows, see log form
    double log_mean_attempts = 0.0;

    void to_cdf_csv(const std::string& path) const { law.to_cdf_csv(path); }
};

// Weights w^(q)_i proportional to w^(p)_i h(l_i, n_RL), evaluated in the log
// domain so p_e within 1e-9 of one still works.
TransferredPacketDistribution transferred_distribution(const GeneratedPacketDistribution& gen,
                                                       const LossModel& loss,
                                                       const RetryPolicy& policy);

// Finite limit of l^(q) as p_e -> 1 with unlimited retries: l^(p)_max.
double asymptotic_max(const GeneratedPacketDistribution& gen);

// Frame size law F^(f)(x) = F^(q)(x - l_h^L).
PointMassLaw frame_distribution(const TransferredPacketDistribution& tq, const LossModel& loss);

}  // namespace rpsp

#pragma once

#include "rpsp/dcf.hpp"

namespace rpsp {

struct GoodputResult {
    double goodput_bps = 0.0;          // G
    double approx_bps = 0.0;           // G-hat, constant-size approximation
    double relative_difference = 0.0;  // (G-hat - G) / G
};

// Goodput in delivered payload bits per second:
//   G = sum_i w_i Pr(delivery|l_i) 8(l_i - swp_header)
//     / sum_i w_i h(l_i) E[T^cycle|l_i].
double goodput(const GeneratedPacketDistribution& gen, const LossModel& loss,
               const RetryPolicy& policy, const DcfParams& params);

// Constant-size approximation: the same ratio evaluated at the mean generated
// size l^(p) (real-valued, no rounding).
double goodput_approx(const GeneratedPacketDistribution& gen, const LossModel& loss,
                      const RetryPolicy& policy, const DcfParams& params);

// (G-hat - G) / G; throws std::domain_error when G = 0.
double relative_difference(const GeneratedPacketDistribution& gen, const LossModel& loss,
                           const RetryPolicy& policy, const DcfParams& params);

GoodputResult goodput_result(const GeneratedPacketDistribution& gen, const LossModel& loss,
                             const RetryPolicy& policy, const DcfParams& params);

}  // namespace rpsp

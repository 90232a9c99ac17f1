#include "rpsp/goodput.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rpsp/stable.hpp"

namespace rpsp {

namespace {

void check_gen(const GeneratedPacketDistribution& gen) {
    if (gen.law.empty()) throw std::invalid_argument("goodput: empty packet law");
    for (double s : gen.law.sizes)
        if (s < gen.config.swp_header)
            throw std::invalid_argument("goodput: packet smaller than its SWP header");
}

}  // namespace

double goodput(const GeneratedPacketDistribution& gen, const LossModel& loss,
               const RetryPolicy& policy, const DcfParams& params) {
    check_gen(gen);
    const std::size_t n = gen.law.count();

    stable::KahanSum numerator;  // delivered payload bits
    stable::KahanSum denominator;
    bool linear_ok = true;
    std::vector<double> log_den(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double size = gen.law.sizes[i];
        const double w = gen.law.weights[i];
        numerator.add(w * delivery_prob(loss, policy, size) * 8.0 * (size - gen.config.swp_header));
        const double log_h = log_expected_attempts(loss, policy, size);
        const double cycle = expected_cycle_time(params, loss, policy, size);
        log_den[i] = std::log(w) + log_h + std::log(cycle);
        if (linear_ok) {
            const double term = w * std::exp(log_h) * cycle;
            if (std::isfinite(term))
                denominator.add(term);
            else
                linear_ok = false;  // h overflowed; rerun the sum in log space
        }
    }
    const double num = numerator.value();
    if (num <= 0.0) return 0.0;
    if (linear_ok && std::isfinite(denominator.value())) return num / denominator.value();
    return std::exp(std::log(num) - stable::log_sum_exp(log_den));
}

double goodput_approx(const GeneratedPacketDistribution& gen, const LossModel& loss,
                      const RetryPolicy& policy, const DcfParams& params) {
    check_gen(gen);
    const double x = gen.mean_size;  // real-valued mean, evaluated continuously
    const double num = delivery_prob(loss, policy, x) * 8.0 * (x - gen.config.swp_header);
    if (num <= 0.0) return 0.0;
    const double log_h = log_expected_attempts(loss, policy, x);
    const double cycle = expected_cycle_time(params, loss, policy, x);
    const double den = std::exp(log_h) * cycle;
    if (std::isfinite(den)) return num / den;
    return std::exp(std::log(num) - log_h - std::log(cycle));
}

double relative_difference(const GeneratedPacketDistribution& gen, const LossModel& loss,
                           const RetryPolicy& policy, const DcfParams& params) {
    const double g = goodput(gen, loss, policy, params);
    if (g <= 0.0)
        throw std::domain_error("relative_difference: goodput is zero (no delivery possible)");
    return (goodput_approx(gen, loss, policy, params) - g) / g;
}

GoodputResult goodput_result(const GeneratedPacketDistribution& gen, const LossModel& loss,
                             const RetryPolicy& policy, const DcfParams& params) {
    GoodputResult r;
    r.goodput_bps = goodput(gen, loss, policy, params);
    r.approx_bps = goodput_approx(gen, loss, policy, params);
    if (r.goodput_bps <= 0.0)
        throw std::domain_error("goodput_result: goodput is zero (no delivery possible)");
    r.relative_difference = (r.approx_bps - r.goodput_bps) / r.goodput_bps;
    return r;
}

}  // namespace rpsp

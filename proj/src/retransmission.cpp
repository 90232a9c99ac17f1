#include "rpsp/retransmission.hpp"

#include <cmath>
#include <stdexcept>

#include "rpsp/stable.hpp"

namespace rpsp {

namespace {

void check_loss(const LossModel& loss) {
    if (!(loss.bit_error_rate >= 0.0) || !(loss.bit_error_rate < 1.0))
        throw std::invalid_argument("LossModel: bit_error_rate must be in [0, 1)");
    if (loss.lower_header < 0.0)
        throw std::invalid_argument("LossModel: lower_header must be >= 0");
}

}  // namespace

RetryPolicy RetryPolicy::finite(int n_rl) {
    if (n_rl < 0) throw std::invalid_argument("RetryPolicy: retry_limit must be >= 0");
    return RetryPolicy{n_rl, false};
}

double loss_prob(const LossModel& loss, double x) {
    check_loss(loss);
    if (x < 0.0) throw std::invalid_argument("loss_prob: size must be >= 0");
    return -std::expm1(loss.log_success(x));
}

double expected_attempts(const LossModel& loss, const RetryPolicy& policy, double x) {
    check_loss(loss);
    if (x < 0.0) throw std::invalid_argument("expected_attempts: size must be >= 0");
    const double c = loss.log_success(x);
    if (policy.unlimited) {
        if (!std::isfinite(c))
            throw std::domain_error("divergent attempt count: g(x) = 1 with unlimited retries");
        return std::exp(-c);  // 1 / (1 - g)
    }
    return stable::geometric_sum(c, static_cast<double>(policy.retry_limit) + 1.0);
}

double log_expected_attempts(const LossModel& loss, const RetryPolicy& policy, double x) {
    check_loss(loss);
    const double c = loss.log_success(x);
    if (policy.unlimited) {
        if (!std::isfinite(c))
            throw std::domain_error("divergent attempt count: g(x) = 1 with unlimited retries");
        return -c;
    }
    return stable::log_geometric_sum(c, static_cast<double>(policy.retry_limit) + 1.0);
}

double delivery_prob(const LossModel& loss, const RetryPolicy& policy, double x) {
    check_loss(loss);
    if (x < 0.0) throw std::invalid_argument("delivery_prob: size must be >= 0");
    const double c = loss.log_success(x);
    if (policy.unlimited) return std::isfinite(c) ? 1.0 : 0.0;  // g < 1 delivers eventually
    if (c == 0.0) return 1.0;  // g = 0
    const double lg = stable::log_g_from_c(c);
    return -std::expm1((static_cast<double>(policy.retry_limit) + 1.0) * lg);
}

TransferredPacketDistribution transferred_distribution(const GeneratedPacketDistribution& gen,
                                                       const LossModel& loss,
                                                       const RetryPolicy& policy) {
    if (gen.law.empty()) throw std::invalid_argument("transferred_distribution: empty law");
    const std::size_t n = gen.law.count();

    if (loss.bit_error_rate == 0.0) {
        // No frame loss, R = 0: the transferred law is the generated law.
        TransferredPacketDistribution tq;
        tq.law = gen.law;
        tq.mean_size = gen.law.mean();
        tq.asymptotic_max = gen.law.max_size();
        tq.mean_attempts = 1.0;
        tq.log_mean_attempts = 0.0;
        return tq;
    }

    std::vector<double> log_wh(n);
    for (std::size_t i = 0; i < n; ++i)
        log_wh[i] = std::log(gen.law.weights[i]) + log_expected_attempts(loss, policy, gen.law.sizes[i]);
    const double lse = stable::log_sum_exp(log_wh);  // log E[R+1]

    TransferredPacketDistribution tq;
    tq.law.sizes = gen.law.sizes;
    tq.law.weights.resize(n);
    stable::KahanSum total, mean;
    for (std::size_t i = 0; i < n; ++i) {
        tq.law.weights[i] = std::exp(log_wh[i] - lse);
        total.add(tq.law.weights[i]);
        mean.add(tq.law.weights[i] * gen.law.sizes[i]);
    }
    // Renormalize the exp rounding so the weights sum to one exactly enough.
    const double norm = total.value();
    stable::KahanSum mean2;
    for (std::size_t i = 0; i < n; ++i) {
        tq.law.weights[i] /= norm;
        mean2.add(tq.law.weights[i] * gen.law.sizes[i]);
    }
    tq.mean_size = mean2.value();
    tq.asymptotic_max = gen.law.max_size();
    tq.log_mean_attempts = lse;
    tq.mean_attempts = std::exp(lse);
    return tq;
}

double asymptotic_max(const GeneratedPacketDistribution& gen) {
    if (gen.law.empty()) throw std::invalid_argument("asymptotic_max: empty law");
    return gen.law.max_size();
}

PointMassLaw frame_distribution(const TransferredPacketDistribution& tq, const LossModel& loss) {
    check_loss(loss);
    PointMassLaw frame = tq.law;
    for (double& s : frame.sizes) s += loss.lower_header;
    return frame;
}

}  // namespace rpsp

#include "rpsp/dcf.hpp"

#include <cmath>
#include <stdexcept>

#include "rpsp/stable.hpp"

namespace rpsp {

namespace {

void check_params(const DcfParams& p) {
    if (p.cw_min < 0 || p.cw_max < p.cw_min)
        throw std::invalid_argument("DcfParams: need 0 <= cw_min <= cw_max");
    if (!(p.slot_time > 0.0) || !(p.data_rate > 0.0) || !(p.basic_rate > 0.0))
        throw std::invalid_argument("DcfParams: slot time and rates must be > 0");
}

// Sum of b_r g^r over stages 0..n divided by the geometric sum of g^r,
// i.e. the mean backoff over the attempt population. Uses the closed tail
// once CW caps, so unlimited policies cost O(cap_stage).
double mean_backoff_over_attempts(const DcfParams& params, double c, const RetryPolicy& policy) {
    const double g = -std::expm1(c);
    const int r0 = params.cap_stage();
    const double b_cap = mean_backoff(params, r0);
    if (policy.unlimited) {
        if (!std::isfinite(c))
            throw std::domain_error("tau: g(x) = 1 with unlimited retries");
        // (1-g) sum_{r<r0} b_r g^r + b_cap g^{r0}
        double s = 0.0, gp = 1.0;
        for (int r = 0; r < r0; ++r) {
            s += mean_backoff(params, r) * gp;
            gp *= g;
        }
        return std::exp(c) * s + b_cap * gp;
    }
    const double m = static_cast<double>(policy.retry_limit) + 1.0;
    double s = 0.0, gp = 1.0;
    const int individual = std::min(policy.retry_limit + 1, r0);
    for (int r = 0; r < individual; ++r) {
        s += mean_backoff(params, r) * gp;
        gp *= g;
    }
    if (policy.retry_limit + 1 > r0)
        s += b_cap * gp * stable::geometric_sum(c, m - static_cast<double>(r0));
    return s / stable::geometric_sum(c, m);
}

}  // namespace

int DcfParams::cap_stage() const {
    int r = 0;
    while (contention_window(*this, r) < cw_max) ++r;
    return r;
}

long long contention_window(const DcfParams& params, int stage) {
    check_params(params);
    if (stage < 0) throw std::invalid_argument("contention_window: stage must be >= 0");
    long long grown = static_cast<long long>(params.cw_min) + 1;
    for (int r = 0; r < stage && grown <= params.cw_max; ++r) grown <<= 1;
    return std::min<long long>(grown - 1, params.cw_max);
}

double mean_backoff(const DcfParams& params, int stage) {
    return static_cast<double>(contention_window(params, stage)) / 2.0;
}

double t_success(const DcfParams& params, double x) {
    check_params(params);
    return (x + params.ack_size) * 8.0 / params.data_rate +
           2.0 * params.lower_header * 8.0 / params.basic_rate + params.t_sifs + params.t_difs;
}

double t_bit_error(const DcfParams& params, double x) {
    check_params(params);
    return x * 8.0 / params.data_rate + params.lower_header * 8.0 / params.basic_rate +
           params.t_eifs;
}

double tau(const DcfParams& params, const LossModel& loss, const RetryPolicy& policy, double x) {
    check_params(params);
    if (x < 0.0) throw std::invalid_argument("tau: size must be >= 0");
    return 1.0 / (1.0 + mean_backoff_over_attempts(params, loss.log_success(x), policy));
}

std::pair<double, double> expected_cycle_time_forms(const DcfParams& params,
                                                    const LossModel& loss,
                                                    const RetryPolicy& policy, double x) {
    check_params(params);
    if (x < 0.0) throw std::invalid_argument("expected_cycle_time: size must be >= 0");
    const double c = loss.log_success(x);
    const double g = -std::expm1(c);
    const double airtime = std::exp(c) * t_success(params, x) + g * t_bit_error(params, x);

    // First form: through the transmission probability.
    const double t = tau(params, loss, policy, x);
    const double first = (1.0 - t) * params.slot_time / t + airtime;

    // Second form: the backoff series itself. Stages are summed literally up
    // to 1024 terms to keep this an independent route; beyond that (or with
    // unlimited retries) the capped tail is closed in exact form.
    double series;
    if (!policy.unlimited && policy.retry_limit + 1 <= 1024) {
        double s = 0.0, gp = 1.0;
        for (int r = 0; r <= policy.retry_limit; ++r) {
            s += mean_backoff(params, r) * gp;
            gp *= g;
        }
        const double m = static_cast<double>(policy.retry_limit) + 1.0;
        series = s / stable::geometric_sum(c, m);
    } else {
        series = mean_backoff_over_attempts(params, c, policy);
    }
    const double second = params.slot_time * series + airtime;
    return {first, second};
}

double expected_cycle_time(const DcfParams& params, const LossModel& loss,
                           const RetryPolicy& policy, double x) {
    auto [first, second] = expected_cycle_time_forms(params, loss, policy, x);
    if (std::abs(first - second) > 1e-12 * std::max(std::abs(first), std::abs(second)))
        throw std::logic_error("expected_cycle_time: dual forms disagree");
    return second;
}

}  // namespace rpsp

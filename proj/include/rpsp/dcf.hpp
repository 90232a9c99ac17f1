#pragma once

#include <utility>

#include "rpsp/retransmission.hpp"

namespace rpsp {

// IEEE 802.11 DCF MAC/PHY constants (defaults: 11 Mbps data over 1 Mbps
// basic rate, DSSS slot/IFS timing).
struct DcfParams {
    double slot_time = 20e-6;    // sigma, seconds
    int cw_min = 31;
    int cw_max = 1023;
    double data_rate = 11e6;     // mu_d, bits/second
    double basic_rate = 1e6;     // mu_b, bits/second
    double t_sifs = 10e-6;
    double t_difs = 50e-6;
    double t_eifs = 263e-6;
    double ack_size = 14.0;      // bytes
    double lower_header = 24.0;  // l_h^L, bytes

    // First backoff stage at which CW_r reaches cw_max.
    int cap_stage() const;
};

// CW_r = min{2^r (CW_min + 1) - 1, CW_max}.
long long contention_window(const DcfParams& params, int stage);

// Mean backoff counter b_r = CW_r / 2 (uniform on [0, CW_r]).
double mean_backoff(const DcfParams& params, int stage);

// Mean interdeparture times for a transferred packet of x bytes when the
// transmission succeeds / fails due to bit errors.
double t_success(const DcfParams& params, double x);
double t_bit_error(const DcfParams& params, double x);

// Per-slot transmission probability tau(x) from the collision-free backoff
// analysis. Throws std::domain_error for an unlimited policy with g(x) = 1.
double tau(const DcfParams& params, const LossModel& loss, const RetryPolicy& policy, double x);

// E[T^cycle | L^(p) = x], computed through both published forms:
// first  (1 - tau) sigma / tau + (1 - g) t_suc + g t_bit,
// second sigma (1-g)/(1-g^{n+1}) sum_r b_r g^r + (1 - g) t_suc + g t_bit.
std::pair<double, double> expected_cycle_time_forms(const DcfParams& params,
                                                    const LossModel& loss,
                                                    const RetryPolicy& policy, double x);

// Returns the value after asserting the two forms agree to 1e-12 relative.
double expected_cycle_time(const DcfParams& params, const LossModel& loss,
                           const RetryPolicy& policy, double x);

}  // namespace rpsp

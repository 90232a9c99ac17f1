#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpsp/goodput.hpp"

namespace rpsp {

// Monte Carlo sender under heavy traffic: a generated packet of size x is
// transmitted with that same size until success or n_RL + 1 attempts, each
// attempt preceded by a uniform backoff on [0, CW_r].
struct SimConfig {
    std::uint64_t seed = 1;
    std::int64_t num_generated_packets = 100000;
    int replications = 1;

    // Exactly one source. Packet mode samples F^(p) directly; message mode
    // samples messages and runs them through the segmentation function.
    std::optional<GeneratedPacketDistribution> packet_source;
    struct MessageSource {
        MessageSizeDistribution message;
        SegmentationConfig seg;
    };
    std::optional<MessageSource> message_source;

    LossModel loss;
    RetryPolicy policy;
    DcfParams dcf;
};

// Appendix-style counters for one generated-packet size.
struct SizeCounters {
    double size = 0.0;             // l^(p)_i, bytes
    std::uint64_t packets = 0;     // M_i
    std::uint64_t attempts = 0;    // sum_kappa Q_{i,kappa}
    std::uint64_t successes = 0;   // N_i
    double cycle_time = 0.0;       // sum of T_{i,j,kappa}, seconds
};

struct SimTotals {
    std::uint64_t packets = 0;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
    double elapsed_time = 0.0;            // t = sum of all cycle durations
    double delivered_payload_bits = 0.0;  // sum_i N_i 8(l_i - swp_header)
};

struct SimReport {
    // Echo of the run parameters (source described, not embedded).
    std::uint64_t seed = 0;
    std::int64_t num_generated_packets = 0;
    int replications = 1;
    std::string source_mode;  // "packet" or "message"
    LossModel loss;
    RetryPolicy policy;
    DcfParams dcf;
    double swp_header = 0.0;

    std::vector<SizeCounters> per_size;  // sorted by size
    SimTotals totals;

    PointMassLaw empirical_transferred;  // attempt-frequency law, estimates F^(q)
    double mean_transferred = 0.0;       // l-hat^(q)
    double mean_attempts = 0.0;          // E-hat[R+1]
    double goodput_bps = 0.0;            // G-hat_sim

    // 95% normal-approximation half-widths across replications (>= 2 reps).
    std::optional<double> hw_mean_transferred;
    std::optional<double> hw_mean_attempts;
    std::optional<double> hw_goodput;

    double per_size_mean_attempts(std::size_t i) const;
    double per_size_delivery_rate(std::size_t i) const;
    double per_size_mean_cycle(std::size_t i) const;

    std::string to_json() const;  // all counters, estimates, config echo
    void to_cdf_csv(const std::string& path) const;
};

SimReport run_simulation(const SimConfig& cfg);

struct ComparisonThresholds {
    double ks = 0.01;
    double mean_size_rel = 0.005;
    double attempts_rel = 0.01;
    double goodput_rel = 0.01;
    double cycle_rel = 0.02;
    std::uint64_t cycle_min_attempts = 10000;  // sizes below this skip the cycle check
};

struct ComparisonResult {
    double ks = 0.0;
    double mean_size_rel_err = 0.0;
    double attempts_rel_err = 0.0;
    double goodput_rel_err = 0.0;
    double max_cycle_rel_err = 0.0;
    std::vector<std::string> violations;  // empty when every metric is in bounds

    bool ok() const { return violations.empty(); }
    std::string to_json() const;
};

// Flags metrics outside their thresholds. Throws std::invalid_argument when
// the report's loss/policy/DCF parameterization differs from the one given.
ComparisonResult compare_to_analytic(const SimReport& report,
                                     const GeneratedPacketDistribution& gen,
                                     const LossModel& loss, const RetryPolicy& policy,
                                     const DcfParams& dcf,
                                     const ComparisonThresholds& thresholds = {});

}  // namespace rpsp

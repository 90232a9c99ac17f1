#include "rpsp/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "rpsp/stable.hpp"

namespace rpsp {

namespace {

using nlohmann::json;

// Engine streams are derived as seed_seq{seed_lo, seed_hi, replication, tag}
// so replications are independent and each draw type (packet sizes, losses,
// backoffs) has its own stream.
enum StreamTag : unsigned { kSizeStream = 0, kLossStream = 1, kBackoffStream = 2 };

std::mt19937_64 make_engine(std::uint64_t seed, unsigned replication, unsigned tag) {
    std::seed_seq seq{static_cast<unsigned>(seed & 0xffffffffu),
                      static_cast<unsigned>(seed >> 32), replication, tag};
    return std::mt19937_64(seq);
}

struct SizeSlot {
    double size = 0.0;
    double g = 0.0;         // per-attempt loss probability
    double log_g = 0.0;
    double t_suc = 0.0;
    double t_bit = 0.0;
    double payload_bits = 0.0;
    SizeCounters counters;
};

struct RepResult {
    std::map<double, SizeCounters> per_size;
    SimTotals totals;
    double mean_transferred = 0.0;
    double mean_attempts = 0.0;
    double goodput_bps = 0.0;
};

class PacketSource {
  public:
    PacketSource(const SimConfig& cfg, std::mt19937_64& rng) : cfg_(cfg), rng_(rng) {
        if (cfg.packet_source) {
            cumulative_ = cfg.packet_source->law.cumulative();
        }
    }

    double next() {
        if (cfg_.packet_source) {
            double u = u01_(rng_);
            auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
            if (it == cumulative_.end()) --it;
            return cfg_.packet_source->law.sizes[static_cast<std::size_t>(
                it - cumulative_.begin())];
        }
        if (pending_index_ >= pending_.size()) {
            const auto& src = *cfg_.message_source;
            pending_ = segment_message(src.message.sample(rng_), src.seg);
            pending_index_ = 0;
        }
        return pending_[pending_index_++];
    }

  private:
    const SimConfig& cfg_;
    std::mt19937_64& rng_;
    std::uniform_real_distribution<double> u01_{0.0, 1.0};
    std::vector<double> cumulative_;
    std::vector<double> pending_;
    std::size_t pending_index_ = 0;
};

// Number of transmission attempts for one seqNum: 1 + min(failures, n_RL)
// with failures geometric of success probability 1 - g. Sampling the
// geometric by inversion is distributionally identical to per-attempt
// Bernoulli draws and keeps unlimited-retry runs tractable.
std::uint64_t sample_attempts(const SizeSlot& slot, const RetryPolicy& policy,
                              std::mt19937_64& loss_rng, bool& delivered) {
    if (slot.g <= 0.0) {
        delivered = true;
        return 1;
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u;
    do {
        u = u01(loss_rng);
    } while (u <= 0.0);
    const double failures = std::floor(std::log(u) / slot.log_g);
    if (policy.unlimited) {
        delivered = true;
        return static_cast<std::uint64_t>(failures) + 1;
    }
    const double limit = static_cast<double>(policy.retry_limit);
    if (failures > limit) {
        delivered = false;
        return static_cast<std::uint64_t>(policy.retry_limit) + 1;
    }
    delivered = true;
    return static_cast<std::uint64_t>(failures) + 1;
}

// Total backoff slots across the attempts of one seqNum. Stages below the CW
// cap are drawn individually; the capped stages are aggregated through the
// bit decomposition of U{0..2^b - 1}: a sum of K such uniforms equals
// sum_b 2^b Binomial(K, 1/2), which is exact and O(1) per packet.
class BackoffSampler {
  public:
    explicit BackoffSampler(const DcfParams& dcf) {
        cap_stage_ = dcf.cap_stage();
        for (int r = 0; r <= cap_stage_; ++r)
            windows_.push_back(contention_window(dcf, r));
        const long long cap = windows_.back() + 1;
        cap_bits_ = 0;
        while ((1LL << cap_bits_) < cap) ++cap_bits_;
        cap_is_pow2_ = (1LL << cap_bits_) == cap;
    }

    std::uint64_t total_slots(std::uint64_t attempts, std::mt19937_64& rng) const {
        std::uint64_t slots = 0;
        const std::uint64_t individual =
            std::min<std::uint64_t>(attempts, static_cast<std::uint64_t>(cap_stage_));
        for (std::uint64_t r = 0; r < individual; ++r)
            slots += draw(windows_[static_cast<std::size_t>(r)], rng);
        if (attempts <= individual) return slots;

        std::uint64_t remaining = attempts - individual;
        const long long cw_cap = windows_.back();
        if (cap_is_pow2_ && remaining > 64) {
            for (int b = 0; b < cap_bits_; ++b) {
                std::binomial_distribution<std::uint64_t> bin(remaining, 0.5);
                slots += (1ULL << b) * bin(rng);
            }
            return slots;
        }
        for (std::uint64_t i = 0; i < remaining; ++i) slots += draw(cw_cap, rng);
        return slots;
    }

  private:
    static std::uint64_t draw(long long cw, std::mt19937_64& rng) {
        std::uniform_int_distribution<long long> d(0, cw);
        return static_cast<std::uint64_t>(d(rng));
    }

    std::vector<long long> windows_;
    int cap_stage_ = 0;
    int cap_bits_ = 0;
    bool cap_is_pow2_ = false;
};

RepResult run_replication(const SimConfig& cfg, unsigned replication, double swp_header) {
    auto size_rng = make_engine(cfg.seed, replication, kSizeStream);
    auto loss_rng = make_engine(cfg.seed, replication, kLossStream);
    auto backoff_rng = make_engine(cfg.seed, replication, kBackoffStream);

    PacketSource source(cfg, size_rng);
    BackoffSampler backoff(cfg.dcf);

    std::unordered_map<double, std::size_t> index;
    std::vector<SizeSlot> slots;
    auto slot_for = [&](double size) -> SizeSlot& {
        auto [it, inserted] = index.try_emplace(size, slots.size());
        if (inserted) {
            SizeSlot s;
            s.size = size;
            const double c = cfg.loss.log_success(size);
            s.g = -std::expm1(c);
            s.log_g = stable::log_g_from_c(c);
            if (cfg.policy.unlimited && !(s.g < 1.0))
                throw std::invalid_argument(
                    "run_simulation: g(x) = 1 atom with unlimited retries");
            s.t_suc = t_success(cfg.dcf, size);
            s.t_bit = t_bit_error(cfg.dcf, size);
            s.payload_bits = 8.0 * (size - swp_header);
            s.counters.size = size;
            slots.push_back(s);
        }
        return slots[it->second];
    };

    RepResult rep;
    stable::KahanSum elapsed, delivered_bits;
    for (std::int64_t kappa = 0; kappa < cfg.num_generated_packets; ++kappa) {
        SizeSlot& slot = slot_for(source.next());
        bool delivered = false;
        const std::uint64_t attempts = sample_attempts(slot, cfg.policy, loss_rng, delivered);
        assert(cfg.policy.unlimited ||
               attempts <= static_cast<std::uint64_t>(cfg.policy.retry_limit) + 1);
        const std::uint64_t slots_used = backoff.total_slots(attempts, backoff_rng);
        const std::uint64_t failures = attempts - (delivered ? 1 : 0);

        const double cycle = static_cast<double>(slots_used) * cfg.dcf.slot_time +
                             static_cast<double>(failures) * slot.t_bit +
                             (delivered ? slot.t_suc : 0.0);
        slot.counters.packets += 1;
        slot.counters.attempts += attempts;
        slot.counters.successes += delivered ? 1 : 0;
        slot.counters.cycle_time += cycle;
        elapsed.add(cycle);
        if (delivered) delivered_bits.add(slot.payload_bits);
    }

    for (const auto& s : slots) {
        rep.per_size[s.size] = s.counters;
        rep.totals.packets += s.counters.packets;
        rep.totals.attempts += s.counters.attempts;
        rep.totals.successes += s.counters.successes;
    }
    rep.totals.elapsed_time = elapsed.value();
    rep.totals.delivered_payload_bits = delivered_bits.value();

    stable::KahanSum size_weighted;
    for (const auto& [size, cnt] : rep.per_size)
        size_weighted.add(size * static_cast<double>(cnt.attempts));
    rep.mean_transferred = size_weighted.value() / static_cast<double>(rep.totals.attempts);
    rep.mean_attempts = static_cast<double>(rep.totals.attempts) /
                        static_cast<double>(rep.totals.packets);
    rep.goodput_bps = rep.totals.delivered_payload_bits / rep.totals.elapsed_time;
    return rep;
}

std::optional<double> half_width(const std::vector<double>& values) {
    if (values.size() < 2) return std::nullopt;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
    return 1.959963984540054 * std::sqrt(var / static_cast<double>(values.size()));
}

json loss_to_json(const LossModel& loss) {
    return json{{"bit_error_rate", loss.bit_error_rate},
                {"lower_header_bytes", loss.lower_header},
                {"size_unit", loss.size_unit == SizeUnit::bits ? "bits" : "bytes"}};
}

json policy_to_json(const RetryPolicy& policy) {
    if (policy.unlimited) return json{{"retry_limit", "inf"}};
    return json{{"retry_limit", policy.retry_limit}};
}

json dcf_to_json(const DcfParams& dcf) {
    return json{{"slot_time", dcf.slot_time},
                {"cw_min", dcf.cw_min},
                {"cw_max", dcf.cw_max},
                {"data_rate", dcf.data_rate},
                {"basic_rate", dcf.basic_rate},
                {"t_sifs", dcf.t_sifs},
                {"t_difs", dcf.t_difs},
                {"t_eifs", dcf.t_eifs},
                {"ack_size_bytes", dcf.ack_size},
                {"lower_header_bytes", dcf.lower_header}};
}

}  // namespace

double SimReport::per_size_mean_attempts(std::size_t i) const {
    return static_cast<double>(per_size[i].attempts) / static_cast<double>(per_size[i].packets);
}

double SimReport::per_size_delivery_rate(std::size_t i) const {
    return static_cast<double>(per_size[i].successes) / static_cast<double>(per_size[i].packets);
}

double SimReport::per_size_mean_cycle(std::size_t i) const {
    return per_size[i].cycle_time / static_cast<double>(per_size[i].attempts);
}

SimReport run_simulation(const SimConfig& cfg) {
    if (cfg.num_generated_packets < 1)
        throw std::invalid_argument("run_simulation: need at least one generated packet");
    if (cfg.replications < 1)
        throw std::invalid_argument("run_simulation: need at least one replication");
    if (cfg.packet_source.has_value() == cfg.message_source.has_value())
        throw std::invalid_argument("run_simulation: configure exactly one source");
    if (cfg.packet_source) cfg.packet_source->law.validate();

    const double swp_header = cfg.packet_source ? cfg.packet_source->config.swp_header
                                                : cfg.message_source->seg.swp_header;

    // Replications are independent; run them concurrently and merge by
    // replication index so the result does not depend on scheduling.
    std::vector<RepResult> reps(static_cast<std::size_t>(cfg.replications));
    std::vector<std::exception_ptr> errors(reps.size());
    const unsigned nthreads =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(cfg.replications)));
    std::atomic<unsigned> next{0};
    auto worker = [&] {
        while (true) {
            unsigned r = next.fetch_add(1);
            if (r >= reps.size()) break;
            try {
                reps[r] = run_replication(cfg, r, swp_header);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    SimReport report;
    report.seed = cfg.seed;
    report.num_generated_packets = cfg.num_generated_packets;
    report.replications = cfg.replications;
    report.source_mode = cfg.packet_source ? "packet" : "message";
    report.loss = cfg.loss;
    report.policy = cfg.policy;
    report.dcf = cfg.dcf;
    report.swp_header = swp_header;

    std::map<double, SizeCounters> merged;
    for (const auto& rep : reps) {
        for (const auto& [size, cnt] : rep.per_size) {
            SizeCounters& m = merged[size];
            m.size = size;
            m.packets += cnt.packets;
            m.attempts += cnt.attempts;
            m.successes += cnt.successes;
            m.cycle_time += cnt.cycle_time;
        }
        report.totals.packets += rep.totals.packets;
        report.totals.attempts += rep.totals.attempts;
        report.totals.successes += rep.totals.successes;
        report.totals.elapsed_time += rep.totals.elapsed_time;
        report.totals.delivered_payload_bits += rep.totals.delivered_payload_bits;
    }
    for (const auto& [size, cnt] : merged) report.per_size.push_back(cnt);

    const double total_attempts = static_cast<double>(report.totals.attempts);
    stable::KahanSum mean;
    for (const auto& cnt : report.per_size) {
        report.empirical_transferred.sizes.push_back(cnt.size);
        report.empirical_transferred.weights.push_back(static_cast<double>(cnt.attempts) /
                                                       total_attempts);
        mean.add(cnt.size * static_cast<double>(cnt.attempts));
    }
    report.mean_transferred = mean.value() / total_attempts;
    report.mean_attempts = total_attempts / static_cast<double>(report.totals.packets);
    report.goodput_bps = report.totals.delivered_payload_bits / report.totals.elapsed_time;

    std::vector<double> lq, er1, gp;
    for (const auto& rep : reps) {
        lq.push_back(rep.mean_transferred);
        er1.push_back(rep.mean_attempts);
        gp.push_back(rep.goodput_bps);
    }
    report.hw_mean_transferred = half_width(lq);
    report.hw_mean_attempts = half_width(er1);
    report.hw_goodput = half_width(gp);
    return report;
}

std::string SimReport::to_json() const {
    json per;
    per = json::array();
    for (std::size_t i = 0; i < per_size.size(); ++i) {
        const auto& c = per_size[i];
        per.push_back(json{{"size_bytes", c.size},
                           {"packets", c.packets},
                           {"attempts", c.attempts},
                           {"successes", c.successes},
                           {"cycle_time_seconds", c.cycle_time},
                           {"mean_attempts", per_size_mean_attempts(i)},
                           {"delivery_rate", per_size_delivery_rate(i)},
                           {"mean_cycle_seconds", per_size_mean_cycle(i)},
                           {"weight", empirical_transferred.weights[i]}});
    }
    json hw;
    hw["mean_transferred_bytes"] =
        hw_mean_transferred ? json(*hw_mean_transferred) : json(nullptr);
    hw["mean_attempts"] = hw_mean_attempts ? json(*hw_mean_attempts) : json(nullptr);
    hw["goodput_bps"] = hw_goodput ? json(*hw_goodput) : json(nullptr);

    json j{{"config",
            json{{"seed", seed},
                 {"num_generated_packets", num_generated_packets},
                 {"replications", replications},
                 {"source_mode", source_mode},
                 {"swp_header_bytes", swp_header},
                 {"loss", loss_to_json(loss)},
                 {"policy", policy_to_json(policy)},
                 {"dcf", dcf_to_json(dcf)}}},
           {"totals",
            json{{"packets", totals.packets},
                 {"attempts", totals.attempts},
                 {"successes", totals.successes},
                 {"elapsed_seconds", totals.elapsed_time},
                 {"delivered_payload_bits", totals.delivered_payload_bits}}},
           {"estimates",
            json{{"mean_transferred_bytes", mean_transferred},
                 {"mean_attempts", mean_attempts},
                 {"goodput_bps", goodput_bps},
                 {"half_widths_95", hw}}},
           {"per_size", per}};
    return j.dump(2) + "\n";
}

void SimReport::to_cdf_csv(const std::string& path) const {
    empirical_transferred.to_cdf_csv(path);
}

std::string ComparisonResult::to_json() const {
    json j{{"ks", ks},
           {"mean_size_rel_err", mean_size_rel_err},
           {"attempts_rel_err", attempts_rel_err},
           {"goodput_rel_err", goodput_rel_err},
           {"max_cycle_rel_err", max_cycle_rel_err},
           {"violations", violations},
           {"ok", ok()}};
    return j.dump(2) + "\n";
}

ComparisonResult compare_to_analytic(const SimReport& report,
                                     const GeneratedPacketDistribution& gen,
                                     const LossModel& loss, const RetryPolicy& policy,
                                     const DcfParams& dcf,
                                     const ComparisonThresholds& thresholds) {
    auto mismatch = [](const std::string& what) {
        throw std::invalid_argument("compare_to_analytic: parameter mismatch: " + what);
    };
    if (report.loss.bit_error_rate != loss.bit_error_rate ||
        report.loss.lower_header != loss.lower_header ||
        report.loss.size_unit != loss.size_unit)
        mismatch("loss model");
    if (report.policy.unlimited != policy.unlimited ||
        (!policy.unlimited && report.policy.retry_limit != policy.retry_limit))
        mismatch("retry policy");
    if (report.dcf.slot_time != dcf.slot_time || report.dcf.cw_min != dcf.cw_min ||
        report.dcf.cw_max != dcf.cw_max || report.dcf.data_rate != dcf.data_rate ||
        report.dcf.basic_rate != dcf.basic_rate || report.dcf.t_sifs != dcf.t_sifs ||
        report.dcf.t_difs != dcf.t_difs || report.dcf.t_eifs != dcf.t_eifs ||
        report.dcf.ack_size != dcf.ack_size || report.dcf.lower_header != dcf.lower_header)
        mismatch("DCF parameters");
    if (report.swp_header != gen.config.swp_header) mismatch("SWP header");

    const auto tq = transferred_distribution(gen, loss, policy);
    const double analytic_g = goodput(gen, loss, policy, dcf);

    ComparisonResult r;
    r.ks = ks_distance(report.empirical_transferred, tq.law);
    r.mean_size_rel_err = std::abs(report.mean_transferred - tq.mean_size) / tq.mean_size;
    r.attempts_rel_err =
        std::abs(report.mean_attempts - tq.mean_attempts) / tq.mean_attempts;
    r.goodput_rel_err = std::abs(report.goodput_bps - analytic_g) / analytic_g;
    for (std::size_t i = 0; i < report.per_size.size(); ++i) {
        if (report.per_size[i].attempts < thresholds.cycle_min_attempts) continue;
        const double analytic = expected_cycle_time(dcf, loss, policy, report.per_size[i].size);
        r.max_cycle_rel_err = std::max(
            r.max_cycle_rel_err, std::abs(report.per_size_mean_cycle(i) - analytic) / analytic);
    }

    if (r.ks >= thresholds.ks) r.violations.push_back("ks");
    if (r.mean_size_rel_err >= thresholds.mean_size_rel) r.violations.push_back("mean_size");
    if (r.attempts_rel_err >= thresholds.attempts_rel) r.violations.push_back("attempts");
    if (r.goodput_rel_err >= thresholds.goodput_rel) r.violations.push_back("goodput");
    if (r.max_cycle_rel_err >= thresholds.cycle_rel) r.violations.push_back("cycle_time");
    return r;
}

}  // namespace rpsp

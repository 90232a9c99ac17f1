#include "rpsp/segmentation.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "csv_io.hpp"
#include "parallel.hpp"
#include "rpsp/stable.hpp"

namespace rpsp {

namespace {

void check_config(const SegmentationConfig& cfg) {
    if (!(cfg.payload_size > 0.0))
        throw std::invalid_argument("segmentation: payload_size must be > 0");
    if (cfg.swp_header < 0.0)
        throw std::invalid_argument("segmentation: swp_header must be >= 0");
}

double packets_per_message(double size, double payload) {
    return std::ceil(size / payload);  // k_i, >= 1 since sizes are positive
}

// Accumulated segmentation statistics: total w*k and edge mass per edge size.
struct SegmentStats {
    double sum_wk = 0.0;
    double mean_message = 0.0;
    std::map<double, double> edge_mass;  // edge size (header included) -> mass
};

SegmentStats segment_discrete(const PointMassLaw& law, const SegmentationConfig& cfg) {
    SegmentStats st;
    stable::KahanSum wk, mm;
    for (std::size_t i = 0; i < law.count(); ++i) {
        const double size = law.sizes[i];
        const double w = law.weights[i];
        const double k = packets_per_message(size, cfg.payload_size);
        wk.add(w * k);
        mm.add(w * size);
        const double edge = size - (k - 1.0) * cfg.payload_size + cfg.swp_header;
        st.edge_mass[edge] += w;
    }
    st.sum_wk = wk.value();
    st.mean_message = mm.value();
    return st;
}

// Streamed integer-byte quantization fused with segmentation: per-byte masses
// are folded into edge-size bins modulo the payload, so memory stays
// O(payload) no matter where the tail truncates.
SegmentStats segment_continuous(const MessageSizeDistribution& msg, const SegmentationConfig& cfg,
                                double tail_mass, const QuantizeOptions& opts) {
    if (!(tail_mass > 0.0) || tail_mass > 1e-6)
        throw std::invalid_argument("segment: tail_mass must be in (0, 1e-6]");
    const long long S = msg.truncation_point(tail_mass);
    if (static_cast<double>(S) > opts.support_cap)
        throw std::invalid_argument("segment: truncation point " + std::to_string(S) +
                                    " exceeds support cap " + csvio::fmt(opts.support_cap) +
                                    " (pathological tail)");
    const long long ld = static_cast<long long>(cfg.payload_size);
    if (static_cast<double>(ld) != cfg.payload_size)
        throw std::invalid_argument("segment: continuous path requires whole-byte payload_size");
    const std::size_t nblocks = static_cast<std::size_t>((S + ld - 1) / ld);

    struct Partial {
        stable::KahanSum wk, mm, mass;
        std::vector<double> bins;
    };
    std::vector<Partial> parts(par::kChunks);
    for (auto& p : parts) p.bins.assign(static_cast<std::size_t>(ld), 0.0);

    // Block j covers message sizes j*ld + 1 .. (j+1)*ld with k = j + 1.
    par::for_chunks(nblocks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Partial& p = parts[chunk];
        for (std::size_t j = begin; j < end; ++j) {
            const double base = static_cast<double>(j) * static_cast<double>(ld);
            const double k = static_cast<double>(j + 1);
            const long long rmax = std::min<long long>(ld, S - static_cast<long long>(j) * ld);
            const bool tail_region = msg.cdf(base) > 0.9;
            double prev = tail_region ? msg.survival(base) : msg.cdf(base);
            stable::KahanSum block_mass;
            for (long long r = 1; r <= rmax; ++r) {
                const double s = base + static_cast<double>(r);
                const double cur = tail_region ? msg.survival(s) : msg.cdf(s);
                const double m = tail_region ? prev - cur : cur - prev;
                prev = cur;
                if (m <= 0.0) continue;
                p.bins[static_cast<std::size_t>(r - 1)] += m;
                block_mass.add(m);
                p.mm.add(m * s);
            }
            p.wk.add(k * block_mass.value());
            p.mass.add(block_mass.value());
        }
    });

    SegmentStats st;
    std::vector<double> bins(static_cast<std::size_t>(ld), 0.0);
    stable::KahanSum wk, mm, mass;
    for (const auto& p : parts) {
        for (std::size_t r = 0; r < bins.size(); ++r) bins[r] += p.bins[r];
        wk.add(p.wk.value());
        mm.add(p.mm.value());
        mass.add(p.mass.value());
    }

    // Residual tail mass sits at S.
    const double tail = msg.survival(static_cast<double>(S));
    const double k_tail = packets_per_message(static_cast<double>(S), cfg.payload_size);
    const long long r_tail = S - static_cast<long long>(k_tail - 1.0) * ld;
    bins[static_cast<std::size_t>(r_tail - 1)] += tail;
    wk.add(k_tail * tail);
    mm.add(tail * static_cast<double>(S));
    mass.add(tail);

    const double total = mass.value();
    st.sum_wk = wk.value() / total;
    st.mean_message = mm.value() / total;
    for (long long r = 1; r <= ld; ++r) {
        const double m = bins[static_cast<std::size_t>(r - 1)] / total;
        if (m > 0.0) st.edge_mass[static_cast<double>(r) + cfg.swp_header] = m;
    }
    return st;
}

SegmentStats stats_for(const MessageSizeDistribution& msg, const SegmentationConfig& cfg,
                       double tail_mass, const QuantizeOptions& opts) {
    if (msg.is_discrete()) return segment_discrete(msg.law(), cfg);
    return segment_continuous(msg, cfg, tail_mass, opts);
}

}  // namespace

double edge_probability(const MessageSizeDistribution& msg, const SegmentationConfig& cfg) {
    check_config(cfg);
    if (!msg.is_discrete())
        throw std::invalid_argument("edge_probability: quantize continuous laws first");
    return 1.0 / segment_discrete(msg.law(), cfg).sum_wk;
}

PointMassLaw edge_distribution(const MessageSizeDistribution& msg, const SegmentationConfig& cfg) {
    check_config(cfg);
    if (!msg.is_discrete())
        throw std::invalid_argument("edge_distribution: quantize continuous laws first");
    auto st = segment_discrete(msg.law(), cfg);
    PointMassLaw law;
    for (const auto& [size, w] : st.edge_mass) {
        law.sizes.push_back(size);
        law.weights.push_back(w);
    }
    law.validate();
    return law;
}

GeneratedPacketDistribution segment(const MessageSizeDistribution& msg,
                                    const SegmentationConfig& cfg, double tail_mass,
                                    QuantizeOptions opts) {
    check_config(cfg);
    auto st = stats_for(msg, cfg, tail_mass, opts);
    const double pi_e = 1.0 / st.sum_wk;

    // Edge masses scaled by pi^E, body mass 1 - pi^E merged at l_d + l_h^R.
    auto masses = st.edge_mass;
    for (auto& [size, w] : masses) w *= pi_e;
    const double body_size = cfg.payload_size + cfg.swp_header;
    masses[body_size] += 1.0 - pi_e;

    GeneratedPacketDistribution gen;
    gen.config = cfg;
    gen.edge_probability = pi_e;
    for (const auto& [size, w] : masses) {
        if (w <= 0.0) continue;
        gen.law.sizes.push_back(size);
        gen.law.weights.push_back(w);
    }
    gen.law.validate();
    gen.mean_size = gen.law.mean();
    gen.max_size = gen.law.max_size();

    // Mean identity l^(p) = pi^E l^(m) + l_h^R must hold by construction.
    const double identity = pi_e * st.mean_message + cfg.swp_header;
    if (std::abs(gen.mean_size - identity) > 1e-9 * std::max(1.0, identity))
        throw std::logic_error("segment: mean identity violated");
    return gen;
}

std::vector<double> segment_message(double message_bytes, const SegmentationConfig& cfg) {
    check_config(cfg);
    if (!(message_bytes > 0.0))
        throw std::invalid_argument("segment_message: message size must be > 0");
    const double k = packets_per_message(message_bytes, cfg.payload_size);
    std::vector<double> packets;
    packets.reserve(static_cast<std::size_t>(k));
    for (double i = 1.0; i < k; i += 1.0)
        packets.push_back(cfg.payload_size + cfg.swp_header);
    packets.push_back(message_bytes - (k - 1.0) * cfg.payload_size + cfg.swp_header);
    return packets;
}

}  // namespace rpsp

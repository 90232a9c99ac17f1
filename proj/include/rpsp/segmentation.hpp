#pragma once

#include <string>
#include <vector>

#include "rpsp/message_models.hpp"

namespace rpsp {

struct SegmentationConfig {
    double payload_size = 2312.0;  // l_d, bytes, > 0
    double swp_header = 34.0;      // SWP header, bytes, >= 0
};

// Generated-packet size law F^(p): edge masses scaled by the edge probability
// plus the body mass at payload_size + swp_header.
struct GeneratedPacketDistribution {
    PointMassLaw law;
    double edge_probability = 1.0;  // pi^E
    double mean_size = 0.0;         // l^(p) = pi^E * l^(m) + swp_header
    double max_size = 0.0;          // l^(p)_max
    SegmentationConfig config;

    void to_weight_csv(const std::string& path) const { law.to_weight_csv(path); }
    void to_cdf_csv(const std::string& path) const { law.to_cdf_csv(path); }
};

// Occurrence probability of edge packets, 1 / sum_i w_i ceil(l_i / l_d).
// Requires a discrete message law (quantize first if continuous).
double edge_probability(const MessageSizeDistribution& msg, const SegmentationConfig& cfg);

// Edge-packet size law: mass of message size l at l - (k-1) l_d + swp_header.
PointMassLaw edge_distribution(const MessageSizeDistribution& msg, const SegmentationConfig& cfg);

// Default truncation cap for the streamed continuous path. Wider than the
// QuantizeOptions default because segmentation never materializes the
// per-byte law; the cap only bounds running time.
inline QuantizeOptions segment_quantize_defaults() { return QuantizeOptions{1e9}; }

// Full segmentation transform. Continuous message laws are quantized
// internally (streamed; memory stays O(payload_size)).
GeneratedPacketDistribution segment(const MessageSizeDistribution& msg,
                                    const SegmentationConfig& cfg,
                                    double tail_mass = 1e-9,
                                    QuantizeOptions opts = segment_quantize_defaults());

// Packet sizes created from a single message: k-1 body packets then the edge.
std::vector<double> segment_message(double message_bytes, const SegmentationConfig& cfg);

}  // namespace rpsp

#pragma once

#include <string>
#include <vector>

#include "rpsp/simulator.hpp"

namespace rpsp {

// Measured Web-object scenarios with the reference MAC/PHY parameter set.
struct ScenarioPreset {
    std::string name;
    MessageSizeDistribution message;
    SegmentationConfig seg;   // payload 2312 B, SWP header 34 B
    LossModel loss;           // p_e set per experiment; lower header 24 B, bits
    RetryPolicy policy;       // default retry limit 7
    DcfParams dcf;
    double tail_mass = 1e-9;
    QuantizeOptions quant = segment_quantize_defaults();

    GeneratedPacketDistribution segmented(double payload_bytes) const;
    GeneratedPacketDistribution segmented() const { return segmented(seg.payload_size); }
};

// Static Web objects: lognormal(mu=6.34, sigma=2.07).
ScenarioPreset preset_static();
// Dynamic Web objects: Weibull(lambda=4.02e-4, nu=1.9).
ScenarioPreset preset_dynamic();

ScenarioPreset preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace rpsp

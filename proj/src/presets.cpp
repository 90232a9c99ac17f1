#include "rpsp/presets.hpp"

#include <stdexcept>

namespace rpsp {

GeneratedPacketDistribution ScenarioPreset::segmented(double payload_bytes) const {
    SegmentationConfig cfg = seg;
    cfg.payload_size = payload_bytes;
    return segment(message, cfg, tail_mass, quant);
}

ScenarioPreset preset_static() {
    ScenarioPreset p;
    p.name = "static";
    p.message = MessageSizeDistribution::lognormal(6.34, 2.07);
    return p;
}

ScenarioPreset preset_dynamic() {
    ScenarioPreset p;
    p.name = "dynamic";
    p.message = MessageSizeDistribution::weibull(4.02e-4, 1.9);
    return p;
}

ScenarioPreset preset_by_name(const std::string& name) {
    if (name == "static") return preset_static();
    if (name == "dynamic") return preset_dynamic();
    throw std::invalid_argument("unknown preset '" + name + "'; available: static, dynamic");
}

std::vector<std::string> preset_names() { return {"static", "dynamic"}; }

}  // namespace rpsp

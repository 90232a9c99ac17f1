#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpsp/sweeps.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::string preset;
    std::optional<double> pe;
    std::string retry_limit;
    std::optional<double> payload;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string size_unit;
    std::optional<double> tail_mass;
    std::optional<long long> num_packets;
    std::optional<int> replications;
    std::string sim_mode;
};

void add_common_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--preset", f.preset, "scenario preset (static, dynamic)");
    cmd->add_option("--pe", f.pe, "bit error rate p_e");
    cmd->add_option("--retry-limit", f.retry_limit, "retry limit n_RL (integer or 'inf')");
    cmd->add_option("--payload", f.payload, "payload size l_d in bytes");
    cmd->add_option("--seed", f.seed, "simulation seed");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--size-unit", f.size_unit, "loss exponent unit")
        ->check(CLI::IsMember({"bits", "bytes"}));
    cmd->add_option("--tail-mass", f.tail_mass, "quantization tail mass");
    cmd->add_option("--num-packets", f.num_packets, "generated packets per simulation");
    cmd->add_option("--replications", f.replications, "independent simulation replications");
    cmd->add_option("--mode", f.sim_mode, "simulation source mode")
        ->check(CLI::IsMember({"packet", "message"}));
}

rpsp::ExperimentConfig resolve(const Flags& f) {
    rpsp::ExperimentConfig cfg;
    bool config_sets_out = false;
    if (!f.config_path.empty()) {
        cfg = rpsp::experiment_from_json_file(f.config_path);
        std::ifstream in(f.config_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        config_sets_out = nlohmann::json::parse(text).contains("out_dir");
        if (!f.preset.empty()) {
            // Flags win: replace the scenario but keep grids and sim settings.
            auto scenario = rpsp::preset_by_name(f.preset);
            scenario.tail_mass = cfg.scenario.tail_mass;
            scenario.loss.size_unit = cfg.scenario.loss.size_unit;
            cfg.scenario = scenario;
        }
    } else {
        cfg = rpsp::default_experiment(f.preset.empty() ? "static" : f.preset);
    }

    if (f.pe) cfg.pe = *f.pe;
    if (!f.retry_limit.empty()) {
        rpsp::RetryPolicy policy = f.retry_limit == "inf"
                                       ? rpsp::RetryPolicy::infinite()
                                       : rpsp::RetryPolicy::finite(std::stoi(f.retry_limit));
        cfg.retry_limits = {policy};
        cfg.scenario.policy = policy;
    }
    if (f.payload) {
        cfg.payloads = {*f.payload};
        cfg.scenario.seg.payload_size = *f.payload;
    }
    if (f.seed) cfg.sim.seed = *f.seed;
    if (f.tail_mass) cfg.scenario.tail_mass = *f.tail_mass;
    if (f.num_packets) cfg.sim.num_packets = *f.num_packets;
    if (f.replications) cfg.sim.replications = *f.replications;
    if (!f.sim_mode.empty()) cfg.sim.mode = f.sim_mode;
    if (!f.size_unit.empty())
        cfg.scenario.loss.size_unit =
            f.size_unit == "bits" ? rpsp::SizeUnit::bits : rpsp::SizeUnit::bytes;

    if (!f.out_dir.empty()) {
        cfg.out_dir = f.out_dir;
    } else if (!config_sets_out) {
        if (const char* env = std::getenv("RPSP_LAB_OUT")) cfg.out_dir = env;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-unit-size distributions and goodput for a stop-and-wait sender "
                 "with retransmitted-packet-size preservation"};
    app.require_subcommand(1);

    Flags flags;
    const std::pair<const char*, const char*> subcommands[] = {
        {"dist", "generated/transferred/frame size CDFs"},
        {"mean-size", "mean packet sizes over a bit-error-rate sweep"},
        {"goodput", "goodput G, constant-size approximation, relative difference"},
        {"simulate", "Monte Carlo run with analytic comparison"},
        {"table2", "mean transferred size at the reference operating points"},
    };
    for (const auto& [name, desc] : subcommands) add_common_options(app.add_subcommand(name, desc), flags);

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        const auto files = rpsp::run_experiment(resolve(flags), sub);
        for (const auto& f : files) std::cout << f << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

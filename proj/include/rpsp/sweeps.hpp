#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpsp/presets.hpp"

namespace rpsp {

// Log-spaced bit-error-rate grid, endpoints included.
struct PeGrid {
    double start = 1e-6;
    double stop = 1e-3;
    int points_per_decade = 3;

    std::vector<double> values() const;
};

struct SimulationSettings {
    std::uint64_t seed = 1;
    std::int64_t num_packets = 1000000;
    int replications = 1;
    std::string mode = "packet";  // "packet" or "message"
};

// One experiment: a scenario plus the sweep grids and output location.
struct ExperimentConfig {
    ScenarioPreset scenario;
    PeGrid pe_grid;
    std::optional<double> pe;  // single-point commands; overrides the grid
    std::vector<double> payloads{2312.0};
    std::vector<RetryPolicy> retry_limits{RetryPolicy{7, false}};
    SimulationSettings sim;
    std::string out_dir = ".";
};

ExperimentConfig default_experiment(const std::string& preset_name = "static");

// JSON config loading with line/field diagnostics. Flag overrides are applied
// by the caller on the returned struct (flags win).
ExperimentConfig experiment_from_json_text(const std::string& text,
                                           const std::string& origin = "<config>");
ExperimentConfig experiment_from_json_file(const std::string& path);

// Fully resolved config echo; written next to every report so a run can be
// reproduced from its manifest alone.
std::string experiment_manifest(const ExperimentConfig& cfg,
                                const std::vector<std::string>& outputs);

// Subcommand drivers; each returns the list of files written (manifest last).
std::vector<std::string> run_dist(const ExperimentConfig& cfg);
std::vector<std::string> run_mean_size(const ExperimentConfig& cfg);
std::vector<std::string> run_goodput(const ExperimentConfig& cfg);
std::vector<std::string> run_table2(const ExperimentConfig& cfg);
std::vector<std::string> run_simulate(const ExperimentConfig& cfg);

std::vector<std::string> run_experiment(const ExperimentConfig& cfg,
                                        const std::string& subcommand);

}  // namespace rpsp

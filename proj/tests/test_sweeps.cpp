#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csv_io.hpp"
#include "doctest.h"
#include "rpsp/sweeps.hpp"

using namespace rpsp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "rpsp_sweeps" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("pe grid: log spacing with exact endpoints") {
    PeGrid grid{1e-6, 1e-3, 3};
    auto v = grid.values();
    REQUIRE(v.size() == 10);
    CHECK(v.front() == 1e-6);
    CHECK(v.back() == doctest::Approx(1e-3).epsilon(1e-12));
    for (std::size_t i = 1; i < v.size(); ++i)
        CHECK(v[i] / v[i - 1] == doctest::Approx(std::pow(10.0, 1.0 / 3)).epsilon(1e-12));
    CHECK_THROWS_AS((PeGrid{0.0, 1e-3, 3}.values()), std::invalid_argument);
    CHECK_THROWS_AS((PeGrid{1e-3, 1e-6, 3}.values()), std::invalid_argument);
}

TEST_CASE("config: full document round-trips into a resolved experiment") {
    const std::string text = R"({
        "preset": "dynamic",
        "payload_bytes": [1500, 2312],
        "retry_limit": [0, 7, "inf"],
        "pe_grid": {"start": 1e-5, "stop": 1e-3, "points_per_decade": 4},
        "size_unit": "bits",
        "tail_mass": 1e-8,
        "sim": {"seed": 99, "num_packets": 5000, "replications": 2, "mode": "message"},
        "out_dir": "somewhere"
    })";
    auto cfg = experiment_from_json_text(text, "test.json");
    CHECK(cfg.scenario.name == "dynamic");
    CHECK(cfg.payloads == std::vector<double>{1500.0, 2312.0});
    REQUIRE(cfg.retry_limits.size() == 3);
    CHECK(cfg.retry_limits[0].retry_limit == 0);
    CHECK(cfg.retry_limits[2].unlimited);
    CHECK(cfg.pe_grid.points_per_decade == 4);
    CHECK(cfg.scenario.tail_mass == 1e-8);
    CHECK(cfg.sim.seed == 99);
    CHECK(cfg.sim.mode == "message");
    CHECK(cfg.out_dir == "somewhere");
}

TEST_CASE("config: diagnostics carry the origin and the offending field") {
    CHECK_THROWS_WITH_AS(experiment_from_json_text("{", "broken.json"),
                         doctest::Contains("broken.json"), std::runtime_error);
    CHECK_THROWS_WITH_AS(experiment_from_json_text(R"({"pe": "high"})", "c.json"),
                         doctest::Contains("field 'pe'"), std::runtime_error);
    CHECK_THROWS_WITH_AS(experiment_from_json_text(R"({"retry_limit": -3})", "c.json"),
                         doctest::Contains("retry_limit"), std::runtime_error);
    CHECK_THROWS_WITH_AS(experiment_from_json_text(R"({"paylod_bytes": 100})", "c.json"),
                         doctest::Contains("paylod_bytes"), std::runtime_error);
    CHECK_THROWS_AS(experiment_from_json_text(R"({"preset": "nonesuch"})", "c.json"),
                    std::invalid_argument);
    CHECK_THROWS_WITH_AS(experiment_from_json_text(R"({"size_unit": "nibbles"})", "c.json"),
                         doctest::Contains("size_unit"), std::runtime_error);
}

TEST_CASE("config: inline message laws") {
    auto cfg = experiment_from_json_text(
        R"({"message": {"kind": "discrete", "point_masses": [[100, 0.5], [900, 0.5]]}})",
        "inline.json");
    CHECK(cfg.scenario.name == "custom");
    CHECK(cfg.scenario.message.is_discrete());
    CHECK(cfg.scenario.message.mean() == doctest::Approx(500.0));
}

TEST_CASE("dist: frame CDF is the generated CDF shifted by the lower header at pe 0") {
    auto dir = fresh_dir("dist");
    auto cfg = default_experiment("dynamic");
    cfg.pe = 0.0;
    cfg.out_dir = dir.string();
    auto files = run_dist(cfg);
    REQUIRE(files.size() == 5);

    auto fp = csvio::read_rows((dir / "dist_fp_cdf.csv").string());
    auto ff = csvio::read_rows((dir / "dist_ff_cdf.csv").string());
    REQUIRE(fp.size() == ff.size());
    CHECK(fp[0] == std::vector<std::string>{"size_bytes", "cdf"});
    for (std::size_t i = 1; i < fp.size(); ++i) {
        const double fp_size = csvio::parse_double(fp[i][0], "fp");
        const double ff_size = csvio::parse_double(ff[i][0], "ff");
        CHECK(ff_size == fp_size + 24.0);
        CHECK(ff[i][1] == fp[i][1]);  // identical mass, shifted support
    }

    // weights file re-parses and every row round-trips through the formatter
    auto weights = csvio::read_rows((dir / "dist_fp_weights.csv").string());
    CHECK(weights[0] == std::vector<std::string>{"size_bytes", "weight"});
    for (std::size_t i = 1; i < weights.size(); ++i) {
        const double w = csvio::parse_double(weights[i][1], "w");
        CHECK(csvio::fmt(w) == weights[i][1]);
    }
}

TEST_CASE("table2: four rows at the reference bit error rates") {
    auto dir = fresh_dir("table2");
    auto cfg = default_experiment("dynamic");
    cfg.out_dir = dir.string();
    run_table2(cfg);
    auto rows = csvio::read_rows((dir / "table2.csv").string());
    REQUIRE(rows.size() == 5);  // header + 4
    CHECK(rows[0] == std::vector<std::string>{"p_e", "l_q_bytes"});
    const double expected[] = {1552.0, 1592.9, 1926.8, 2334.8};
    for (int i = 0; i < 4; ++i) {
        const double got = csvio::parse_double(rows[i + 1][1], "table2");
        CHECK(std::abs(got - expected[i]) / expected[i] < 0.005);
    }
}

TEST_CASE("goodput sweep: deterministic grid order and valid cells") {
    auto dir = fresh_dir("goodput");
    auto cfg = default_experiment("dynamic");
    cfg.pe_grid = PeGrid{1e-5, 1e-4, 2};
    cfg.retry_limits = {RetryPolicy::finite(0), RetryPolicy::infinite()};
    cfg.out_dir = dir.string();
    run_goodput(cfg);
    auto rows = csvio::read_rows((dir / "goodput.csv").string());
    REQUIRE(rows.size() == 1 + 3 * 2);
    CHECK(rows[0][0] == "p_e");
    CHECK(rows[1][1] == "0");
    CHECK(rows[4][1] == "inf");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double g = csvio::parse_double(rows[i][3], "G");
        const double mbps = csvio::parse_double(rows[i][6], "G_mbps");
        CHECK(g > 0.0);
        CHECK(mbps == doctest::Approx(g / 1e6).epsilon(1e-12));
    }
}

TEST_CASE("mean-size sweep emits the generated and transferred means") {
    auto dir = fresh_dir("mean_size");
    auto cfg = default_experiment("dynamic");
    cfg.pe_grid = PeGrid{1e-5, 1e-4, 1};
    cfg.retry_limits = {RetryPolicy::infinite()};
    cfg.out_dir = dir.string();
    run_mean_size(cfg);
    auto rows = csvio::read_rows((dir / "mean_size.csv").string());
    REQUIRE(rows.size() == 3);
    const double lp = csvio::parse_double(rows[1][3], "l_p");
    const double lq1 = csvio::parse_double(rows[1][4], "l_q");
    const double lq2 = csvio::parse_double(rows[2][4], "l_q");
    CHECK(lp == doctest::Approx(1547.6).epsilon(1e-3));
    CHECK(lq1 < lq2);  // reweighting grows with p_e
}

TEST_CASE("simulate: manifest determines a byte-identical rerun") {
    auto dir = fresh_dir("sim");
    auto cfg = default_experiment("dynamic");
    cfg.pe = 1e-4;
    cfg.sim.seed = 42;
    cfg.sim.num_packets = 200000;
    cfg.out_dir = dir.string();
    run_simulate(cfg);
    const std::string report1 = slurp((dir / "sim_report.json").string());
    const std::string cdf1 = slurp((dir / "sim_cdf.csv").string());
    const std::string manifest1 = slurp((dir / "sim_manifest.json").string());
    run_simulate(cfg);
    CHECK(slurp((dir / "sim_report.json").string()) == report1);
    CHECK(slurp((dir / "sim_cdf.csv").string()) == cdf1);
    CHECK(slurp((dir / "sim_manifest.json").string()) == manifest1);

    // the comparison against the analytic law holds at these settings
    const std::string cmp = slurp((dir / "sim_comparison.json").string());
    CHECK(cmp.find("\"ok\": true") != std::string::npos);
}

TEST_CASE("goodput sweep: divergent cells are marked invalid, not numeric") {
    auto dir = fresh_dir("invalid");
    auto cfg = default_experiment("dynamic");
    // p_e = 0.9 pushes g(x) to one for every atom: no delivery is possible
    cfg.pe_grid = PeGrid{0.9, 0.9, 1};
    cfg.out_dir = dir.string();
    run_goodput(cfg);
    auto rows = csvio::read_rows((dir / "goodput.csv").string());
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][3] == "invalid");
    CHECK(rows[1][5] == "invalid");
    CHECK(csvio::parse_double(rows[1][0], "pe") == 0.9);  // the rest still parses
}

TEST_CASE("run_experiment dispatches by subcommand name") {
    auto dir = fresh_dir("dispatch");
    auto cfg = default_experiment("dynamic");
    cfg.out_dir = dir.string();
    CHECK(run_experiment(cfg, "table2").size() == 2);
    CHECK_THROWS_AS(run_experiment(cfg, "nonesuch"), std::invalid_argument);
}

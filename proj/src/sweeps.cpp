#include "rpsp/sweeps.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "csv_io.hpp"
#include "json.hpp"
#include "parallel.hpp"

namespace rpsp {

namespace {

using nlohmann::json;

[[noreturn]] void cfg_error(const std::string& origin, const std::string& field,
                            const std::string& what) {
    throw std::runtime_error(origin + ": field '" + field + "': " + what);
}

double require_number(const json& j, const std::string& origin, const std::string& field) {
    if (!j.is_number()) cfg_error(origin, field, "expected a number");
    return j.get<double>();
}

MessageSizeDistribution parse_message(const json& j, const std::string& origin) {
    if (!j.is_object() || !j.contains("kind"))
        cfg_error(origin, "message", "expected an object with a 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "lognormal")
        return MessageSizeDistribution::lognormal(require_number(j.at("mu"), origin, "message.mu"),
                                                  require_number(j.at("sigma"), origin,
                                                                 "message.sigma"));
    if (kind == "weibull")
        return MessageSizeDistribution::weibull(
            require_number(j.at("lambda"), origin, "message.lambda"),
            require_number(j.at("nu"), origin, "message.nu"));
    if (kind == "discrete" || kind == "empirical") {
        if (kind == "empirical" && j.contains("path"))
            return MessageSizeDistribution::empirical_from_csv(j.at("path").get<std::string>());
        if (!j.contains("point_masses"))
            cfg_error(origin, "message.point_masses", "required for discrete laws");
        PointMassLaw law;
        for (const auto& pair : j.at("point_masses")) {
            if (!pair.is_array() || pair.size() != 2)
                cfg_error(origin, "message.point_masses", "expected [size, weight] pairs");
            law.sizes.push_back(pair[0].get<double>());
            law.weights.push_back(pair[1].get<double>());
        }
        return kind == "discrete" ? MessageSizeDistribution::discrete(std::move(law))
                                  : MessageSizeDistribution::empirical(std::move(law));
    }
    cfg_error(origin, "message.kind", "unknown kind '" + kind + "'");
}

RetryPolicy parse_retry(const json& j, const std::string& origin) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return RetryPolicy::infinite();
        cfg_error(origin, "retry_limit", "expected an integer >= 0 or \"inf\"");
    }
    if (!j.is_number_integer() || j.get<long long>() < 0)
        cfg_error(origin, "retry_limit", "expected an integer >= 0 or \"inf\"");
    return RetryPolicy::finite(j.get<int>());
}

json message_to_json(const MessageSizeDistribution& m) {
    switch (m.kind()) {
        case MessageKind::lognormal:
            return json{{"kind", "lognormal"}, {"mu", m.mu()}, {"sigma", m.sigma_ln()}};
        case MessageKind::weibull:
            return json{{"kind", "weibull"}, {"lambda", m.lambda()}, {"nu", m.nu()}};
        case MessageKind::discrete:
        case MessageKind::empirical: {
            json masses = json::array();
            for (std::size_t i = 0; i < m.law().count(); ++i)
                masses.push_back(json::array({m.law().sizes[i], m.law().weights[i]}));
            return json{{"kind", m.kind() == MessageKind::discrete ? "discrete" : "empirical"},
                        {"point_masses", masses}};
        }
    }
    return json{};
}

std::string retry_label(const RetryPolicy& p) {
    return p.unlimited ? "inf" : std::to_string(p.retry_limit);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_manifest(const ExperimentConfig& cfg, const std::string& path,
                    const std::vector<std::string>& outputs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << experiment_manifest(cfg, outputs);
}

LossModel loss_at(const ExperimentConfig& cfg, double pe) {
    LossModel loss = cfg.scenario.loss;
    loss.bit_error_rate = pe;
    return loss;
}

double single_pe(const ExperimentConfig& cfg) { return cfg.pe.value_or(1e-4); }

}  // namespace

std::vector<double> PeGrid::values() const {
    if (!(start > 0.0) || !(stop >= start))
        throw std::invalid_argument("PeGrid: need 0 < start <= stop");
    if (points_per_decade < 1)
        throw std::invalid_argument("PeGrid: points_per_decade must be >= 1");
    std::vector<double> v;
    for (int k = 0;; ++k) {
        const double value =
            start * std::pow(10.0, static_cast<double>(k) / points_per_decade);
        if (value > stop * (1.0 + 1e-9)) break;
        v.push_back(std::min(value, stop));
    }
    return v;
}

ExperimentConfig default_experiment(const std::string& preset_name) {
    ExperimentConfig cfg;
    cfg.scenario = preset_by_name(preset_name);
    cfg.payloads = {cfg.scenario.seg.payload_size};
    cfg.retry_limits = {cfg.scenario.policy};
    return cfg;
}

ExperimentConfig experiment_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error(origin + ": config must be a JSON object");

    static const std::set<std::string> known{
        "preset",   "message",     "payload_bytes", "retry_limit", "pe",
        "pe_grid",  "size_unit",   "tail_mass",     "swp_header",  "lower_header",
        "dcf",      "sim",         "out_dir"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) cfg_error(origin, key, "unknown field");

    ExperimentConfig cfg = default_experiment(j.value("preset", "static"));
    if (j.contains("message")) {
        cfg.scenario.message = parse_message(j.at("message"), origin);
        if (!j.contains("preset")) cfg.scenario.name = "custom";
    }

    if (j.contains("payload_bytes")) {
        cfg.payloads.clear();
        const json& p = j.at("payload_bytes");
        if (p.is_array())
            for (const auto& v : p) cfg.payloads.push_back(require_number(v, origin, "payload_bytes"));
        else
            cfg.payloads.push_back(require_number(p, origin, "payload_bytes"));
        for (double v : cfg.payloads)
            if (!(v > 0.0)) cfg_error(origin, "payload_bytes", "must be > 0");
        cfg.scenario.seg.payload_size = cfg.payloads.front();
    }

    if (j.contains("retry_limit")) {
        cfg.retry_limits.clear();
        const json& r = j.at("retry_limit");
        if (r.is_array())
            for (const auto& v : r) cfg.retry_limits.push_back(parse_retry(v, origin));
        else
            cfg.retry_limits.push_back(parse_retry(r, origin));
        cfg.scenario.policy = cfg.retry_limits.front();
    }

    if (j.contains("pe")) cfg.pe = require_number(j.at("pe"), origin, "pe");
    if (j.contains("pe_grid")) {
        const json& g = j.at("pe_grid");
        if (!g.is_object()) cfg_error(origin, "pe_grid", "expected an object");
        cfg.pe_grid.start = require_number(g.value("start", json(cfg.pe_grid.start)), origin,
                                           "pe_grid.start");
        cfg.pe_grid.stop =
            require_number(g.value("stop", json(cfg.pe_grid.stop)), origin, "pe_grid.stop");
        if (g.contains("points_per_decade")) {
            if (!g.at("points_per_decade").is_number_integer())
                cfg_error(origin, "pe_grid.points_per_decade", "expected an integer");
            cfg.pe_grid.points_per_decade = g.at("points_per_decade").get<int>();
        }
        (void)cfg.pe_grid.values();  // validates
    }

    if (j.contains("size_unit")) {
        const std::string u = j.at("size_unit").get<std::string>();
        if (u == "bits")
            cfg.scenario.loss.size_unit = SizeUnit::bits;
        else if (u == "bytes")
            cfg.scenario.loss.size_unit = SizeUnit::bytes;
        else
            cfg_error(origin, "size_unit", "expected \"bits\" or \"bytes\"");
    }
    if (j.contains("tail_mass")) {
        cfg.scenario.tail_mass = require_number(j.at("tail_mass"), origin, "tail_mass");
        if (!(cfg.scenario.tail_mass > 0.0) || cfg.scenario.tail_mass > 1e-6)
            cfg_error(origin, "tail_mass", "must be in (0, 1e-6]");
    }
    if (j.contains("swp_header"))
        cfg.scenario.seg.swp_header = require_number(j.at("swp_header"), origin, "swp_header");
    if (j.contains("lower_header")) {
        const double v = require_number(j.at("lower_header"), origin, "lower_header");
        cfg.scenario.loss.lower_header = v;
        cfg.scenario.dcf.lower_header = v;
    }

    if (j.contains("dcf")) {
        const json& d = j.at("dcf");
        if (!d.is_object()) cfg_error(origin, "dcf", "expected an object");
        DcfParams& p = cfg.scenario.dcf;
        static const std::set<std::string> dcf_known{
            "slot_time", "cw_min", "cw_max",   "data_rate", "basic_rate",
            "t_sifs",    "t_difs", "t_eifs",   "ack_size"};
        for (const auto& [key, _] : d.items())
            if (!dcf_known.count(key)) cfg_error(origin, "dcf." + key, "unknown field");
        p.slot_time = require_number(d.value("slot_time", json(p.slot_time)), origin, "dcf.slot_time");
        if (d.contains("cw_min")) p.cw_min = d.at("cw_min").get<int>();
        if (d.contains("cw_max")) p.cw_max = d.at("cw_max").get<int>();
        p.data_rate = require_number(d.value("data_rate", json(p.data_rate)), origin, "dcf.data_rate");
        p.basic_rate =
            require_number(d.value("basic_rate", json(p.basic_rate)), origin, "dcf.basic_rate");
        p.t_sifs = require_number(d.value("t_sifs", json(p.t_sifs)), origin, "dcf.t_sifs");
        p.t_difs = require_number(d.value("t_difs", json(p.t_difs)), origin, "dcf.t_difs");
        p.t_eifs = require_number(d.value("t_eifs", json(p.t_eifs)), origin, "dcf.t_eifs");
        p.ack_size = require_number(d.value("ack_size", json(p.ack_size)), origin, "dcf.ack_size");
    }

    if (j.contains("sim")) {
        const json& s = j.at("sim");
        if (!s.is_object()) cfg_error(origin, "sim", "expected an object");
        if (s.contains("seed")) cfg.sim.seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("num_packets")) cfg.sim.num_packets = s.at("num_packets").get<std::int64_t>();
        if (s.contains("replications")) cfg.sim.replications = s.at("replications").get<int>();
        if (s.contains("mode")) {
            cfg.sim.mode = s.at("mode").get<std::string>();
            if (cfg.sim.mode != "packet" && cfg.sim.mode != "message")
                cfg_error(origin, "sim.mode", "expected \"packet\" or \"message\"");
        }
    }
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    return cfg;
}

ExperimentConfig experiment_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return experiment_from_json_text(text, path);
}

std::string experiment_manifest(const ExperimentConfig& cfg,
                                const std::vector<std::string>& outputs) {
    json retry = json::array();
    for (const auto& r : cfg.retry_limits)
        retry.push_back(r.unlimited ? json("inf") : json(r.retry_limit));
    json j{{"scenario",
            json{{"name", cfg.scenario.name},
                 {"message", message_to_json(cfg.scenario.message)},
                 {"payload_bytes", cfg.scenario.seg.payload_size},
                 {"swp_header_bytes", cfg.scenario.seg.swp_header},
                 {"lower_header_bytes", cfg.scenario.loss.lower_header},
                 {"size_unit", cfg.scenario.loss.size_unit == SizeUnit::bits ? "bits" : "bytes"},
                 {"tail_mass", cfg.scenario.tail_mass},
                 {"quantize_support_cap", cfg.scenario.quant.support_cap},
                 {"dcf",
                  json{{"slot_time", cfg.scenario.dcf.slot_time},
                       {"cw_min", cfg.scenario.dcf.cw_min},
                       {"cw_max", cfg.scenario.dcf.cw_max},
                       {"data_rate", cfg.scenario.dcf.data_rate},
                       {"basic_rate", cfg.scenario.dcf.basic_rate},
                       {"t_sifs", cfg.scenario.dcf.t_sifs},
                       {"t_difs", cfg.scenario.dcf.t_difs},
                       {"t_eifs", cfg.scenario.dcf.t_eifs},
                       {"ack_size_bytes", cfg.scenario.dcf.ack_size}}}}},
           {"pe", cfg.pe ? json(*cfg.pe) : json(nullptr)},
           {"pe_grid",
            json{{"start", cfg.pe_grid.start},
                 {"stop", cfg.pe_grid.stop},
                 {"points_per_decade", cfg.pe_grid.points_per_decade}}},
           {"payloads", cfg.payloads},
           {"retry_limits", retry},
           {"sim",
            json{{"seed", cfg.sim.seed},
                 {"num_packets", cfg.sim.num_packets},
                 {"replications", cfg.sim.replications},
                 {"mode", cfg.sim.mode}}},
           {"out_dir", cfg.out_dir},
           {"outputs", outputs}};
    return j.dump(2) + "\n";
}

std::vector<std::string> run_dist(const ExperimentConfig& cfg) {
    const double pe = single_pe(cfg);
    const auto gen = cfg.scenario.segmented(cfg.payloads.front());
    const LossModel loss = loss_at(cfg, pe);
    const auto tq = transferred_distribution(gen, loss, cfg.retry_limits.front());
    const auto frame = frame_distribution(tq, loss);

    std::vector<std::string> files{out_path(cfg, "dist_fp_weights.csv"),
                                   out_path(cfg, "dist_fp_cdf.csv"),
                                   out_path(cfg, "dist_fq_cdf.csv"),
                                   out_path(cfg, "dist_ff_cdf.csv")};
    gen.to_weight_csv(files[0]);
    gen.to_cdf_csv(files[1]);
    tq.to_cdf_csv(files[2]);
    frame.to_cdf_csv(files[3]);
    write_manifest(cfg, out_path(cfg, "dist_manifest.json"), files);
    files.push_back(out_path(cfg, "dist_manifest.json"));
    return files;
}

std::vector<std::string> run_mean_size(const ExperimentConfig& cfg) {
    const auto pes = cfg.pe_grid.values();
    csvio::Writer w(out_path(cfg, "mean_size.csv"));
    w.row({"p_e", "n_RL", "payload_bytes", "l_p_bytes", "l_q_bytes"});
    for (double payload : cfg.payloads) {
        const auto gen = cfg.scenario.segmented(payload);
        for (const auto& policy : cfg.retry_limits) {
            for (double pe : pes) {
                const auto tq = transferred_distribution(gen, loss_at(cfg, pe), policy);
                w.row({csvio::fmt(pe), retry_label(policy), csvio::fmt(payload),
                       csvio::fmt(gen.mean_size), csvio::fmt(tq.mean_size)});
            }
        }
    }
    w.close();
    std::vector<std::string> files{out_path(cfg, "mean_size.csv")};
    write_manifest(cfg, out_path(cfg, "mean_size_manifest.json"), files);
    files.push_back(out_path(cfg, "mean_size_manifest.json"));
    return files;
}

std::vector<std::string> run_goodput(const ExperimentConfig& cfg) {
    const auto pes = cfg.pe_grid.values();

    struct Cell {
        double pe = 0.0, payload = 0.0;
        RetryPolicy policy;
        bool valid = false;
        GoodputResult result;
        std::string error;
    };
    std::vector<Cell> cells;
    std::vector<GeneratedPacketDistribution> gens;
    for (double payload : cfg.payloads) {
        gens.push_back(cfg.scenario.segmented(payload));
        for (const auto& policy : cfg.retry_limits)
            for (double pe : pes)
                cells.push_back(Cell{pe, payload, policy, false, {}, {}});
    }
    const std::size_t per_payload = cfg.retry_limits.size() * pes.size();

    // Cells are independent; evaluate concurrently, emit rows in grid order.
    par::for_chunks(cells.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Cell& cell = cells[i];
            const auto& gen = gens[i / per_payload];
            try {
                cell.result = goodput_result(gen, loss_at(cfg, cell.pe), cell.policy,
                                             cfg.scenario.dcf);
                cell.valid = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    });

    csvio::Writer w(out_path(cfg, "goodput.csv"));
    w.row({"p_e", "n_RL", "payload_bytes", "G_bps", "Ghat_bps", "rel_diff", "G_mbps",
           "Ghat_mbps"});
    for (const auto& cell : cells) {
        if (cell.valid) {
            w.row({csvio::fmt(cell.pe), retry_label(cell.policy), csvio::fmt(cell.payload),
                   csvio::fmt(cell.result.goodput_bps), csvio::fmt(cell.result.approx_bps),
                   csvio::fmt(cell.result.relative_difference),
                   csvio::fmt(cell.result.goodput_bps / 1e6),
                   csvio::fmt(cell.result.approx_bps / 1e6)});
        } else {
            w.row({csvio::fmt(cell.pe), retry_label(cell.policy), csvio::fmt(cell.payload),
                   "invalid", "invalid", "invalid", "invalid", "invalid"});
        }
    }
    w.close();
    std::vector<std::string> files{out_path(cfg, "goodput.csv")};
    write_manifest(cfg, out_path(cfg, "goodput_manifest.json"), files);
    files.push_back(out_path(cfg, "goodput_manifest.json"));
    return files;
}

std::vector<std::string> run_table2(const ExperimentConfig& cfg) {
    // Reference table setup: retry limit -> infinity, tail mass 1e-9.
    ScenarioPreset scenario = cfg.scenario;
    scenario.tail_mass = 1e-9;
    const auto gen = scenario.segmented(cfg.payloads.front());
    csvio::Writer w(out_path(cfg, "table2.csv"));
    w.row({"p_e", "l_q_bytes"});
    for (double pe : {1e-6, 1e-5, 1e-4, 1e-3}) {
        const auto tq = transferred_distribution(gen, loss_at(cfg, pe), RetryPolicy::infinite());
        w.row({csvio::fmt(pe), csvio::fmt(tq.mean_size)});
    }
    w.close();
    std::vector<std::string> files{out_path(cfg, "table2.csv")};
    write_manifest(cfg, out_path(cfg, "table2_manifest.json"), files);
    files.push_back(out_path(cfg, "table2_manifest.json"));
    return files;
}

std::vector<std::string> run_simulate(const ExperimentConfig& cfg) {
    const double pe = single_pe(cfg);
    const auto gen = cfg.scenario.segmented(cfg.payloads.front());

    SimConfig sim;
    sim.seed = cfg.sim.seed;
    sim.num_generated_packets = cfg.sim.num_packets;
    sim.replications = cfg.sim.replications;
    sim.loss = loss_at(cfg, pe);
    sim.policy = cfg.retry_limits.front();
    sim.dcf = cfg.scenario.dcf;
    if (cfg.sim.mode == "message") {
        SegmentationConfig seg = cfg.scenario.seg;
        seg.payload_size = cfg.payloads.front();
        sim.message_source = SimConfig::MessageSource{cfg.scenario.message, seg};
    } else {
        sim.packet_source = gen;
    }

    const auto report = run_simulation(sim);
    const auto comparison =
        compare_to_analytic(report, gen, sim.loss, sim.policy, sim.dcf);

    std::vector<std::string> files{out_path(cfg, "sim_report.json"),
                                   out_path(cfg, "sim_cdf.csv"),
                                   out_path(cfg, "sim_comparison.json")};
    {
        std::ofstream out(files[0]);
        out << report.to_json();
    }
    report.to_cdf_csv(files[1]);
    {
        std::ofstream out(files[2]);
        out << comparison.to_json();
    }
    write_manifest(cfg, out_path(cfg, "sim_manifest.json"), files);
    files.push_back(out_path(cfg, "sim_manifest.json"));
    return files;
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg,
                                        const std::string& subcommand) {
    if (subcommand == "dist") return run_dist(cfg);
    if (subcommand == "mean-size") return run_mean_size(cfg);
    if (subcommand == "goodput") return run_goodput(cfg);
    if (subcommand == "table2") return run_table2(cfg);
    if (subcommand == "simulate") return run_simulate(cfg);
    throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
}

}  // namespace rpsp

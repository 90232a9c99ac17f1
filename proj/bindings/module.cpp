#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rpsp/sweeps.hpp"

namespace py = pybind11;
using namespace rpsp;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stop-and-wait data-unit-size distributions, DCF goodput and the "
              "Monte Carlo cross-validator";

    py::class_<PointMassLaw>(m, "PointMassLaw")
        .def(py::init([](std::vector<double> sizes, std::vector<double> weights) {
                 PointMassLaw law{std::move(sizes), std::move(weights)};
                 law.validate();
                 return law;
             }),
             py::arg("sizes"), py::arg("weights"))
        .def_readonly("sizes", &PointMassLaw::sizes)
        .def_readonly("weights", &PointMassLaw::weights)
        .def("cdf", &PointMassLaw::cdf)
        .def("mean", &PointMassLaw::mean)
        .def("max_size", &PointMassLaw::max_size)
        .def("__len__", &PointMassLaw::count);
    m.def("ks_distance", &ks_distance);

    py::class_<QuantizeOptions>(m, "QuantizeOptions")
        .def(py::init<>())
        .def_readwrite("support_cap", &QuantizeOptions::support_cap);

    py::class_<MessageSizeDistribution>(m, "MessageSizeDistribution")
        .def_static("discrete", &MessageSizeDistribution::discrete)
        .def_static("empirical", &MessageSizeDistribution::empirical)
        .def_static("empirical_from_csv", &MessageSizeDistribution::empirical_from_csv)
        .def_static("lognormal", &MessageSizeDistribution::lognormal)
        .def_static("weibull", &MessageSizeDistribution::weibull)
        .def("cdf", &MessageSizeDistribution::cdf)
        .def("survival", &MessageSizeDistribution::survival)
        .def("mean", &MessageSizeDistribution::mean)
        .def("quantize", &MessageSizeDistribution::quantize, py::arg("tail_mass"),
             py::arg("options") = QuantizeOptions{})
        .def("is_discrete", &MessageSizeDistribution::is_discrete)
        .def_property_readonly("law", &MessageSizeDistribution::law)
        .def("sample", [](const MessageSizeDistribution& d, std::uint64_t seed, std::size_t n) {
            std::mt19937_64 rng(seed);
            std::vector<double> out(n);
            for (auto& v : out) v = d.sample(rng);
            return out;
        }, py::arg("seed"), py::arg("n") = std::size_t{1});

    py::class_<SegmentationConfig>(m, "SegmentationConfig")
        .def(py::init<>())
        .def(py::init([](double payload, double header) {
                 return SegmentationConfig{payload, header};
             }),
             py::arg("payload_size"), py::arg("swp_header"))
        .def_readwrite("payload_size", &SegmentationConfig::payload_size)
        .def_readwrite("swp_header", &SegmentationConfig::swp_header);

    py::class_<GeneratedPacketDistribution>(m, "GeneratedPacketDistribution")
        .def_readonly("law", &GeneratedPacketDistribution::law)
        .def_readonly("edge_probability", &GeneratedPacketDistribution::edge_probability)
        .def_readonly("mean_size", &GeneratedPacketDistribution::mean_size)
        .def_readonly("max_size", &GeneratedPacketDistribution::max_size)
        .def_readonly("config", &GeneratedPacketDistribution::config)
        .def("to_weight_csv", &GeneratedPacketDistribution::to_weight_csv)
        .def("to_cdf_csv", &GeneratedPacketDistribution::to_cdf_csv);

    m.def("edge_probability", &edge_probability);
    m.def("edge_distribution", &edge_distribution);
    m.def("segment", &segment, py::arg("message"), py::arg("config"),
          py::arg("tail_mass") = 1e-9, py::arg("options") = segment_quantize_defaults());
    m.def("segment_message", &segment_message);

    py::enum_<SizeUnit>(m, "SizeUnit")
        .value("bits", SizeUnit::bits)
        .value("bytes", SizeUnit::bytes);

    py::class_<LossModel>(m, "LossModel")
        .def(py::init([](double pe, double lower_header, SizeUnit unit) {
                 return LossModel{pe, lower_header, unit};
             }),
             py::arg("bit_error_rate") = 0.0, py::arg("lower_header") = 24.0,
             py::arg("size_unit") = SizeUnit::bits)
        .def_readwrite("bit_error_rate", &LossModel::bit_error_rate)
        .def_readwrite("lower_header", &LossModel::lower_header)
        .def_readwrite("size_unit", &LossModel::size_unit);
    m.def("loss_prob", &loss_prob);

    py::class_<RetryPolicy>(m, "RetryPolicy")
        .def_static("finite", &RetryPolicy::finite)
        .def_static("infinite", &RetryPolicy::infinite)
        .def_readonly("retry_limit", &RetryPolicy::retry_limit)
        .def_readonly("unlimited", &RetryPolicy::unlimited);

    m.def("expected_attempts", &expected_attempts);
    m.def("log_expected_attempts", &log_expected_attempts);
    m.def("delivery_prob", &delivery_prob);
    m.def("asymptotic_max", &asymptotic_max);
    m.def("frame_distribution", &frame_distribution);

    py::class_<TransferredPacketDistribution>(m, "TransferredPacketDistribution")
        .def_readonly("law", &TransferredPacketDistribution::law)
        .def_readonly("mean_size", &TransferredPacketDistribution::mean_size)
        .def_readonly("asymptotic_max", &TransferredPacketDistribution::asymptotic_max)
        .def_readonly("mean_attempts", &TransferredPacketDistribution::mean_attempts)
        .def_readonly("log_mean_attempts", &TransferredPacketDistribution::log_mean_attempts)
        .def("to_cdf_csv", &TransferredPacketDistribution::to_cdf_csv);
    m.def("transferred_distribution", &transferred_distribution);

    py::class_<DcfParams>(m, "DcfParams")
        .def(py::init<>())
        .def_readwrite("slot_time", &DcfParams::slot_time)
        .def_readwrite("cw_min", &DcfParams::cw_min)
        .def_readwrite("cw_max", &DcfParams::cw_max)
        .def_readwrite("data_rate", &DcfParams::data_rate)
        .def_readwrite("basic_rate", &DcfParams::basic_rate)
        .def_readwrite("t_sifs", &DcfParams::t_sifs)
        .def_readwrite("t_difs", &DcfParams::t_difs)
        .def_readwrite("t_eifs", &DcfParams::t_eifs)
        .def_readwrite("ack_size", &DcfParams::ack_size)
        .def_readwrite("lower_header", &DcfParams::lower_header);
    m.def("contention_window", &contention_window);
    m.def("mean_backoff", &mean_backoff);
    m.def("t_success", &t_success);
    m.def("t_bit_error", &t_bit_error);
    m.def("tau", &tau);
    m.def("expected_cycle_time", &expected_cycle_time);

    py::class_<GoodputResult>(m, "GoodputResult")
        .def_readonly("goodput_bps", &GoodputResult::goodput_bps)
        .def_readonly("approx_bps", &GoodputResult::approx_bps)
        .def_readonly("relative_difference", &GoodputResult::relative_difference);
    m.def("goodput", &goodput);
    m.def("goodput_approx", &goodput_approx);
    m.def("relative_difference", &relative_difference);
    m.def("goodput_result", &goodput_result);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("num_generated_packets", &SimConfig::num_generated_packets)
        .def_readwrite("replications", &SimConfig::replications)
        .def_readwrite("loss", &SimConfig::loss)
        .def_readwrite("policy", &SimConfig::policy)
        .def_readwrite("dcf", &SimConfig::dcf)
        .def("set_packet_source",
             [](SimConfig& cfg, const GeneratedPacketDistribution& gen) {
                 cfg.packet_source = gen;
                 cfg.message_source.reset();
             })
        .def("set_message_source",
             [](SimConfig& cfg, const MessageSizeDistribution& msg, const SegmentationConfig& seg) {
                 cfg.message_source = SimConfig::MessageSource{msg, seg};
                 cfg.packet_source.reset();
             });

    py::class_<SimReport>(m, "SimReport")
        .def_readonly("empirical_transferred", &SimReport::empirical_transferred)
        .def_readonly("mean_transferred", &SimReport::mean_transferred)
        .def_readonly("mean_attempts", &SimReport::mean_attempts)
        .def_readonly("goodput_bps", &SimReport::goodput_bps)
        .def("to_json", &SimReport::to_json)
        .def("to_cdf_csv", &SimReport::to_cdf_csv);
    m.def("run_simulation", &run_simulation,
          py::call_guard<py::gil_scoped_release>());

    py::class_<ComparisonThresholds>(m, "ComparisonThresholds")
        .def(py::init<>())
        .def_readwrite("ks", &ComparisonThresholds::ks)
        .def_readwrite("mean_size_rel", &ComparisonThresholds::mean_size_rel)
        .def_readwrite("attempts_rel", &ComparisonThresholds::attempts_rel)
        .def_readwrite("goodput_rel", &ComparisonThresholds::goodput_rel)
        .def_readwrite("cycle_rel", &ComparisonThresholds::cycle_rel)
        .def_readwrite("cycle_min_attempts", &ComparisonThresholds::cycle_min_attempts);

    py::class_<ComparisonResult>(m, "ComparisonResult")
        .def_readonly("ks", &ComparisonResult::ks)
        .def_readonly("mean_size_rel_err", &ComparisonResult::mean_size_rel_err)
        .def_readonly("attempts_rel_err", &ComparisonResult::attempts_rel_err)
        .def_readonly("goodput_rel_err", &ComparisonResult::goodput_rel_err)
        .def_readonly("max_cycle_rel_err", &ComparisonResult::max_cycle_rel_err)
        .def_readonly("violations", &ComparisonResult::violations)
        .def("ok", &ComparisonResult::ok)
        .def("to_json", &ComparisonResult::to_json);
    m.def("compare_to_analytic", &compare_to_analytic, py::arg("report"), py::arg("gen"),
          py::arg("loss"), py::arg("policy"), py::arg("dcf"),
          py::arg("thresholds") = ComparisonThresholds{});

    py::class_<ScenarioPreset>(m, "ScenarioPreset")
        .def_readonly("name", &ScenarioPreset::name)
        .def_readonly("message", &ScenarioPreset::message)
        .def_readwrite("seg", &ScenarioPreset::seg)
        .def_readwrite("loss", &ScenarioPreset::loss)
        .def_readwrite("policy", &ScenarioPreset::policy)
        .def_readwrite("dcf", &ScenarioPreset::dcf)
        .def_readwrite("tail_mass", &ScenarioPreset::tail_mass)
        .def("segmented", py::overload_cast<double>(&ScenarioPreset::segmented, py::const_))
        .def("segmented", py::overload_cast<>(&ScenarioPreset::segmented, py::const_));
    m.def("preset_static", &preset_static);
    m.def("preset_dynamic", &preset_dynamic);
    m.def("preset_by_name", &preset_by_name);
    m.def("preset_names", &preset_names);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("scenario", &ExperimentConfig::scenario)
        .def_readwrite("out_dir", &ExperimentConfig::out_dir);
    m.def("default_experiment", &default_experiment, py::arg("preset_name") = "static");
    m.def("experiment_from_json_text", &experiment_from_json_text, py::arg("text"),
          py::arg("origin") = "<config>");
    m.def("experiment_from_json_file", &experiment_from_json_file);
    m.def("run_experiment", &run_experiment);

#ifdef RPSP_VERSION
#define RPSP_STR2(x) #x
#define RPSP_STR(x) RPSP_STR2(x)
    m.attr("__version__") = RPSP_STR(RPSP_VERSION);
#else
    m.attr("__version__") = "dev";
#endif
}

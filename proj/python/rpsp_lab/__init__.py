"""Data-unit-size distributions and goodput for a stop-and-wait sender with
retransmitted-packet-size preservation, plus the seeded Monte Carlo
cross-validator. Thin re-export of the compiled core."""

from ._core import (  # noqa: F401
    ComparisonResult,
    ComparisonThresholds,
    DcfParams,
    ExperimentConfig,
    GeneratedPacketDistribution,
    GoodputResult,
    LossModel,
    MessageSizeDistribution,
    PointMassLaw,
    QuantizeOptions,
    RetryPolicy,
    ScenarioPreset,
    SegmentationConfig,
    SimConfig,
    SimReport,
    SizeUnit,
    TransferredPacketDistribution,
    __version__,
    asymptotic_max,
    compare_to_analytic,
    contention_window,
    default_experiment,
    delivery_prob,
    edge_distribution,
    edge_probability,
    expected_attempts,
    expected_cycle_time,
    experiment_from_json_file,
    experiment_from_json_text,
    frame_distribution,
    goodput,
    goodput_approx,
    goodput_result,
    ks_distance,
    log_expected_attempts,
    loss_prob,
    mean_backoff,
    preset_by_name,
    preset_dynamic,
    preset_names,
    preset_static,
    relative_difference,
    run_experiment,
    run_simulation,
    segment,
    segment_message,
    t_bit_error,
    t_success,
    tau,
    transferred_distribution,
)

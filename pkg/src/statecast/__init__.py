"""Optimal linear transmission of a scalar plant state over a
power-constrained Gaussian channel: closed-form schemes, their recursive
filters, Monte Carlo validation, and a brute-force optimality check.
"""

from .baseline import (
    BaselineResult,
    CausalOperator,
    alternating_optimize,
    build_H,
    mse_objective,
    objective_gradient_G,
    optimal_F_given_G,
    project_power,
    shift_matrix,
)
from .cli import ExperimentConfig, main, parse_config
from .kalman import (
    CoupledDecoderSchedule,
    DecoderSchedule,
    GainSchedule,
    coupled_decoder_filter,
    coupled_decoder_schedule,
    decoder_filter,
    decoder_schedule,
    power_scale,
    transmitter_filter,
    transmitter_gain_schedule,
)
from .model import (
    ChannelParams,
    RngSeed,
    SystemParams,
    Trajectory,
    draw_noise,
    mean_trajectory,
    paths_from_noise,
    simulate_plant,
    state_variance,
)
from .scheme import (
    RunResult,
    SchemeKind,
    SchemeSamples,
    analytic_mse,
    encode_full_state,
    encode_noisy_state,
    monte_carlo_mse,
    sample_paths,
)

__all__ = [
    "BaselineResult",
    "CausalOperator",
    "ChannelParams",
    "CoupledDecoderSchedule",
    "DecoderSchedule",
    "ExperimentConfig",
    "GainSchedule",
    "RngSeed",
    "RunResult",
    "SchemeKind",
    "SchemeSamples",
    "SystemParams",
    "Trajectory",
    "alternating_optimize",
    "analytic_mse",
    "build_H",
    "coupled_decoder_filter",
    "coupled_decoder_schedule",
    "decoder_filter",
    "decoder_schedule",
    "draw_noise",
    "encode_full_state",
    "encode_noisy_state",
    "main",
    "mean_trajectory",
    "monte_carlo_mse",
    "mse_objective",
    "objective_gradient_G",
    "optimal_F_given_G",
    "parse_config",
    "paths_from_noise",
    "power_scale",
    "project_power",
    "sample_paths",
    "shift_matrix",
    "simulate_plant",
    "state_variance",
    "transmitter_filter",
    "transmitter_gain_schedule",
]

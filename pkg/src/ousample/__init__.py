"""Simulation, estimation and sampling design for stochastically sampled
continuous-time AR(1) (Ornstein-Uhlenbeck) processes."""

from .asymptotics import (AsymptoticSummary, exponential_case, proposition1,
                          proposition2, theorem1)
from .design import (DesignProblem, DesignSolution, minimax_relative_bias,
                     optimize_rate, rate_curve)
from .estimators import (EstimateReport, MomentEstimator, NumericMLE,
                         UniformMLE, mle_numeric, mle_uniform, moment_estimate)
from .montecarlo import (ExperimentConfig, ExperimentReport, evaluate_report,
                         finite_n_oracle, run_experiment)
from .process import (ProcessParams, SampledPath, simulate, simulate_ensemble,
                      transition)
from .spacing import (ExponentialSpacing, LaplaceRangeError,
                      ShiftedExponentialSpacing, SpacingLaw, UniformSpacing,
                      spacing_law_from_config)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSummary", "exponential_case", "proposition1", "proposition2",
    "theorem1",
    "DesignProblem", "DesignSolution", "minimax_relative_bias", "optimize_rate",
    "rate_curve",
    "EstimateReport", "MomentEstimator", "NumericMLE", "UniformMLE",
    "mle_numeric", "mle_uniform", "moment_estimate",
    "ExperimentConfig", "ExperimentReport", "evaluate_report",
    "finite_n_oracle", "run_experiment",
    "ProcessParams", "SampledPath", "simulate", "simulate_ensemble", "transition",
    "ExponentialSpacing", "LaplaceRangeError", "ShiftedExponentialSpacing",
    "SpacingLaw", "UniformSpacing", "spacing_law_from_config",
]

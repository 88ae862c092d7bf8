"""Optimal average sampling rate under asymptotic accuracy criteria.

For Poisson or minimum-separation ("truncated exponential") sampling the
asymptotic bias and variance of the drift estimator depend on the rate beta;
this module minimizes them over beta, either pointwise in the drift or in a
minimax sense (worst relative bias over a drift interval). Every solution
carries the coarse scan used to bracket the optimum, so results can be
audited against a plain grid search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._optimize import grid_then_golden
from .asymptotics import drift_bias_limit, drift_variance_limit
from .spacing import ExponentialSpacing, ShiftedExponentialSpacing, SpacingLaw

__all__ = [
    "DesignProblem",
    "DesignSolution",
    "optimize_rate",
    "rate_curve",
    "minimax_relative_bias",
    "DEFAULT_BETA_BOUNDS",
]

DEFAULT_BETA_BOUNDS = (1e-2, 1e3)

CRITERIA = ("abs_bias", "variance", "minimax_relative_bias")
FAMILIES = ("exponential", "truncated")


def _make_law(family: str, beta: float, delta: float) -> SpacingLaw:
    if family == "exponential":
        return ExponentialSpacing(beta=beta)
    if family == "truncated":
        return ShiftedExponentialSpacing(delta=delta, beta=beta)
    raise ValueError(f"unknown spacing family {family!r}; expected one of {FAMILIES}")


@dataclass(frozen=True)
class DesignProblem:
    """Specification of one rate-design optimization.

    ``alpha`` is required for the pointwise criteria, ``alpha_interval`` for
    the minimax criterion. ``delta`` only matters for the truncated family.
    """

    family: str
    criterion: str
    alpha: float | None = None
    alpha_interval: tuple[float, float] | None = None
    delta: float = 0.0
    beta_bounds: tuple[float, float] = DEFAULT_BETA_BOUNDS
    grid_size: int = 200

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        lo, hi = self.beta_bounds
        if not (0.0 < lo < hi):
            raise ValueError(f"invalid beta bounds {self.beta_bounds}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.criterion == "minimax_relative_bias":
            if self.alpha_interval is None:
                raise ValueError("minimax criterion requires alpha_interval")
            alo, ahi = self.alpha_interval
            if not (0.0 < alo < ahi):
                raise ValueError(f"invalid alpha interval {self.alpha_interval}")
            if self.grid_size < 10:
                raise ValueError("minimax inner grid needs at least 10 points")
        else:
            if self.alpha is None or not self.alpha > 0.0:
                raise ValueError("pointwise criteria require a positive alpha")


@dataclass
class DesignSolution:
    beta_star: float
    objective_value: float
    criterion: str
    at_boundary: bool = False
    scan: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "beta_star": self.beta_star,
            "objective_value": self.objective_value,
            "criterion": self.criterion,
            "at_boundary": self.at_boundary,
            "scan": [[b, v] for b, v in self.scan],
        }


def _objective(problem: DesignProblem):
    family, delta = problem.family, problem.delta
    if problem.criterion == "abs_bias":
        alpha = problem.alpha

        def f(beta: float) -> float:
            return abs(drift_bias_limit(alpha, _make_law(family, beta, delta)))

        return f
    if problem.criterion == "variance":
        alpha = problem.alpha

        def f(beta: float) -> float:
            return drift_variance_limit(alpha, _make_law(family, beta, delta))

        return f
    alo, ahi = problem.alpha_interval
    alphas = np.geomspace(alo, ahi, problem.grid_size)

    def f(beta: float) -> float:
        law = _make_law(family, beta, delta)
        return max(abs(drift_bias_limit(a, law)) / a for a in alphas)

    return f


def optimize_rate(problem: DesignProblem) -> DesignSolution:
    """Minimize the problem's criterion over beta.

    Coarse log-spaced scan to bracket, golden-section refinement to relative
    tolerance 1e-6 in beta. A minimum on the boundary of ``beta_bounds`` is
    reported with ``at_boundary=True``, not treated as an error.
    """
    f = _objective(problem)
    lo, hi = problem.beta_bounds
    beta, value, scan, at_boundary = grid_then_golden(
        f, lo, hi, grid_points=200, log_scale=True, xtol_rel=1e-6,
    )
    return DesignSolution(
        beta_star=beta, objective_value=value, criterion=problem.criterion,
        at_boundary=at_boundary, scan=scan,
    )


def rate_curve(family: str, criterion: str, alpha_grid, delta: float = 0.0,
               beta_bounds=DEFAULT_BETA_BOUNDS) -> list[dict]:
    """Optimal rate as a function of the drift: one solution per grid point.

    Rows have keys ``alpha, criterion, beta_star, objective, status``; a
    point that fails to optimize becomes a gap row with the error message in
    ``status`` instead of aborting the curve.
    """
    alpha_grid = list(alpha_grid)
    if not alpha_grid:
        raise ValueError("alpha_grid must be non-empty")
    rows = []
    for alpha in alpha_grid:
        try:
            sol = optimize_rate(DesignProblem(
                family=family, criterion=criterion, alpha=float(alpha),
                delta=delta, beta_bounds=tuple(beta_bounds),
            ))
            rows.append({
                "alpha": float(alpha), "criterion": criterion,
                "beta_star": sol.beta_star, "objective": sol.objective_value,
                "status": "boundary" if sol.at_boundary else "ok",
            })
        except ValueError as exc:
            rows.append({
                "alpha": float(alpha), "criterion": criterion,
                "beta_star": math.nan, "objective": math.nan,
                "status": f"error: {exc}",
            })
    return rows


def minimax_relative_bias(family: str, alpha_interval, delta: float = 0.0,
                          beta_bounds=DEFAULT_BETA_BOUNDS,
                          grid_size: int = 200) -> DesignSolution:
    """Rate minimizing the worst |asymptotic bias|/alpha over a drift
    interval; the inner maximum runs over a fixed log grid of drifts."""
    problem = DesignProblem(
        family=family, criterion="minimax_relative_bias",
        alpha_interval=tuple(alpha_interval), delta=delta,
        beta_bounds=tuple(beta_bounds), grid_size=grid_size,
    )
    return optimize_rate(problem)

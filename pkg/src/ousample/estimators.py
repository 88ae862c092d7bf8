"""Point estimators for the OU drift and innovation variance.

Three methods operate on a :class:`~ousample.process.SampledPath`:

* ``moment_estimate`` -- the distribution-free moment estimator. With
  T_n = (1/n) sum X_{t_{i+1}} X_{t_i} and V_n = (1/n) sum X_{t_i}^2, the
  drift estimate inverts the spacing law's Laplace transform at T_n/V_n and
  the variance estimate is 2 * alpha_hat * V_n.
* ``mle_uniform`` -- the closed-form Gaussian MLE for uniformly spaced data.
* ``mle_numeric`` -- the profiled Gaussian likelihood maximized numerically
  over the drift, valid for arbitrary strictly increasing sampling times.

Estimation can genuinely fail on short paths (the moment ratio can fall
outside the range of a Laplace transform); failures are reported with a
reason instead of being clamped, so replicate studies can count them.

Thin scikit-learn style wrappers (``MomentEstimator``, ``UniformMLE``,
``NumericMLE``) expose the same computations through fit/get_params.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._optimize import grid_then_golden
from .process import SampledPath
from .spacing import LaplaceRangeError, SpacingLaw

__all__ = [
    "EstimateReport",
    "moment_estimate",
    "mle_uniform",
    "mle_numeric",
    "MomentEstimator",
    "UniformMLE",
    "NumericMLE",
]

STATUS_OK = "ok"

#: column order of the one-row CSV serialization
CSV_FIELDS = ("method", "n", "alpha_hat", "sigma2_hat", "t_n", "v_n", "g_hat", "status")


@dataclass
class EstimateReport:
    """Outcome of one estimation run.

    ``alpha_hat``/``sigma2_hat`` are NaN when ``status`` is not ``"ok"``;
    the sample moments are still reported so failures stay auditable.
    """

    method: str
    n: int
    alpha_hat: float
    sigma2_hat: float
    t_n: float
    v_n: float
    g_hat: float
    status: str = STATUS_OK
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def to_dict(self) -> dict:
        def _num(x):
            return None if x is None or (isinstance(x, float) and math.isnan(x)) else x

        return {
            "method": self.method,
            "n": self.n,
            "alpha_hat": _num(self.alpha_hat),
            "sigma2_hat": _num(self.sigma2_hat),
            "t_n": self.t_n,
            "v_n": self.v_n,
            "g_hat": self.g_hat,
            "status": self.status,
            "diagnostics": {k: _num(v) for k, v in self.diagnostics.items()},
        }

    def to_csv_row(self) -> str:
        vals = [self.method, str(self.n)]
        for x in (self.alpha_hat, self.sigma2_hat, self.t_n, self.v_n, self.g_hat):
            vals.append(repr(float(x)))
        vals.append(self.status)
        return ",".join(vals)


def _sample_moments(path: SampledPath):
    x = path.values
    n = path.n
    t_n = float(np.dot(x[1:], x[:-1])) / n
    v_n = float(np.dot(x, x)) / n
    return t_n, v_n


def moment_estimate(path: SampledPath, law: SpacingLaw) -> EstimateReport:
    """Distribution-free moment estimator of (alpha, sigma^2).

    ``law`` must be the spacing law that generated the sampling times; only
    its Laplace transform is consumed.
    """
    t_n, v_n = _sample_moments(path)
    g_hat = t_n / v_n
    report = EstimateReport(
        method="moment", n=path.n, alpha_hat=math.nan, sigma2_hat=math.nan,
        t_n=t_n, v_n=v_n, g_hat=g_hat,
    )
    if not 0.0 < g_hat < 1.0:
        report.status = "ratio outside Laplace range"
        return report
    try:
        alpha_hat = law.inverse_laplace(g_hat)
    except LaplaceRangeError:
        report.status = "ratio outside Laplace range"
        return report
    report.alpha_hat = alpha_hat
    report.sigma2_hat = 2.0 * alpha_hat * v_n
    return report


def mle_uniform(path: SampledPath, delta: float, rtol: float = 1e-9) -> EstimateReport:
    """Closed-form Gaussian MLE for a uniformly sampled path."""
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    dts = path.spacings
    if np.max(np.abs(dts - delta)) > rtol * delta:
        raise ValueError("non-uniform times: path spacings do not match delta")
    x = path.values
    n = path.n
    t_n, v_n = _sample_moments(path)
    num = float(np.dot(x[1:], x[:-1]))
    den = float(np.dot(x[:-1], x[:-1]))
    phi = num / den
    report = EstimateReport(
        method="mle_uniform", n=n, alpha_hat=math.nan, sigma2_hat=math.nan,
        t_n=t_n, v_n=v_n, g_hat=t_n / v_n, diagnostics={"phi_hat": phi},
    )
    if not 0.0 < phi < 1.0:
        report.status = "phi outside (0,1)"
        return report
    alpha_hat = -math.log(phi) / delta
    resid = x[1:] - phi * x[:-1]
    sigma2_hat = 2.0 * alpha_hat * float(np.dot(resid, resid)) / n / (1.0 - phi * phi)
    report.alpha_hat = alpha_hat
    report.sigma2_hat = sigma2_hat
    return report


def _profile_negloglik(alpha: float, dts: np.ndarray, x: np.ndarray) -> float:
    # Conditional (transition-only) profile likelihood: for fixed alpha the
    # stationary-variance optimum is eta = mean of r^2/(1 - e^{-2 a dt}) over
    # the n-1 transitions. The (n-1)/2 normalization makes the uniform-spacing
    # specialization coincide exactly with the closed-form MLE.
    w = -np.expm1(-2.0 * alpha * dts)  # 1 - exp(-2 a dt)
    r = x[1:] - np.exp(-alpha * dts) * x[:-1]
    q = float(np.sum(r * r / w))
    m = dts.size
    if q <= 0.0:
        return -math.inf
    eta = q / m
    return 0.5 * m * math.log(eta) + 0.5 * float(np.sum(np.log(w)))


def mle_numeric(path: SampledPath, alpha_min: float = 1e-6, alpha_max_start: float = 10.0,
                alpha_max_cap: float = 1e4, xtol: float = 1e-8) -> EstimateReport:
    """Numeric Gaussian MLE for arbitrarily (irregularly) sampled paths.

    The innovation variance is profiled out analytically and the resulting
    one-dimensional likelihood in alpha is maximized by a coarse log grid
    followed by golden-section refinement to absolute tolerance ``xtol``.
    The upper search bound doubles while the maximizer sits on it, up to
    ``alpha_max_cap``.
    """
    if path.n < 3:
        raise ValueError(f"mle_numeric needs n >= 3, got {path.n}")
    dts = path.spacings
    x = path.values
    t_n, v_n = _sample_moments(path)
    report = EstimateReport(
        method="mle_numeric", n=path.n, alpha_hat=math.nan, sigma2_hat=math.nan,
        t_n=t_n, v_n=v_n, g_hat=t_n / v_n,
    )

    def objective(a: float) -> float:
        return _profile_negloglik(a, dts, x)

    alpha_max = alpha_max_start
    rounds = 0
    while True:
        alpha_hat, fmin, scan, at_boundary = grid_then_golden(
            objective, alpha_min, alpha_max, grid_points=200, log_scale=True,
            xtol_abs=xtol,
        )
        hit_upper = at_boundary and alpha_hat > math.sqrt(alpha_min * alpha_max)
        if not hit_upper:
            break
        if alpha_max >= alpha_max_cap:
            report.status = "alpha unbounded"
            report.diagnostics["alpha_max"] = alpha_max
            return report
        alpha_max = min(2.0 * alpha_max, alpha_max_cap)
        rounds += 1

    w = -np.expm1(-2.0 * alpha_hat * dts)
    r = x[1:] - np.exp(-alpha_hat * dts) * x[:-1]
    sigma2_hat = 2.0 * alpha_hat * float(np.sum(r * r / w)) / path.n
    report.alpha_hat = alpha_hat
    report.sigma2_hat = sigma2_hat
    report.diagnostics.update(
        log_likelihood=-fmin, alpha_max=alpha_max, expansions=rounds,
    )
    return report


def _as_path(times, values) -> SampledPath:
    return SampledPath(np.asarray(times, dtype=float), np.asarray(values, dtype=float))


class _PathEstimator(BaseEstimator):
    """Shared fit plumbing for the scikit-learn style wrappers."""

    def _estimate(self, path: SampledPath) -> EstimateReport:  # pragma: no cover
        raise NotImplementedError

    def fit(self, times, values):
        """Estimate from observation times and process values.

        Sets ``alpha_``, ``sigma2_`` (NaN on estimation failure) and the full
        ``report_``.
        """
        path = _as_path(times, values)
        self.report_ = self._estimate(path)
        self.alpha_ = self.report_.alpha_hat
        self.sigma2_ = self.report_.sigma2_hat
        self.n_samples_ = path.n
        return self

    def score(self, times, values) -> float:
        """Average exact-transition log density of the data at the fitted
        parameters (stationary initial term included)."""
        if not hasattr(self, "report_"):
            raise RuntimeError("estimator is not fitted")
        if not self.report_.ok or not self.sigma2_ > 0.0:
            return -math.inf
        path = _as_path(times, values)
        a, eta = self.alpha_, self.sigma2_ / (2.0 * self.alpha_)
        dts = path.spacings
        x = path.values
        w = eta * -np.expm1(-2.0 * a * dts)
        r = x[1:] - np.exp(-a * dts) * x[:-1]
        ll = -0.5 * (math.log(2.0 * math.pi * eta) + x[0] ** 2 / eta)
        ll += float(np.sum(-0.5 * (np.log(2.0 * math.pi * w) + r * r / w)))
        return ll / path.n


class MomentEstimator(_PathEstimator):
    """Distribution-free moment estimator, parameterized by the spacing law."""

    def __init__(self, law: SpacingLaw = None):
        self.law = law

    def _estimate(self, path: SampledPath) -> EstimateReport:
        if self.law is None:
            raise ValueError("MomentEstimator requires a spacing law")
        return moment_estimate(path, self.law)


class UniformMLE(_PathEstimator):
    """Closed-form MLE for uniformly spaced observations."""

    def __init__(self, delta: float = 1.0):
        self.delta = delta

    def _estimate(self, path: SampledPath) -> EstimateReport:
        return mle_uniform(path, self.delta)


class NumericMLE(_PathEstimator):
    """Profiled numeric MLE for irregular sampling times."""

    def __init__(self, alpha_min: float = 1e-6, alpha_max_start: float = 10.0,
                 alpha_max_cap: float = 1e4, xtol: float = 1e-8):
        self.alpha_min = alpha_min
        self.alpha_max_start = alpha_max_start
        self.alpha_max_cap = alpha_max_cap
        self.xtol = xtol

    def _estimate(self, path: SampledPath) -> EstimateReport:
        return mle_numeric(path, alpha_min=self.alpha_min,
                           alpha_max_start=self.alpha_max_start,
                           alpha_max_cap=self.alpha_max_cap, xtol=self.xtol)

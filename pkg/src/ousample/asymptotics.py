"""Closed-form asymptotic bias and variance of the moment estimator.

All limits are the leading constants of the n -> infinity expansions: a
reported value c means the corresponding bias or variance behaves like c/n.
Everything is assembled from the spacing law's Laplace transform g, its
derivatives, and the renewal integral R = integral of exp(-2*alpha*v) against
the renewal density.

``exponential_case`` evaluates the independently derived rational expressions
for Poisson sampling and exists purely as a cross-check of the general
assembly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .process import ProcessParams
from .spacing import SpacingLaw

__all__ = [
    "AsymptoticSummary",
    "proposition1",
    "proposition2",
    "theorem1",
    "exponential_case",
    "drift_bias_limit",
    "drift_variance_limit",
]


@dataclass(frozen=True)
class AsymptoticSummary:
    """Limit constants for the sample moments and the two estimators.

    ``e_tn`` is exact at finite n when a sample size is supplied; every other
    field is an n->infinity limit of n times the named bias/variance.
    """

    e_tn: float
    e_vn: float
    n_var_tn: float
    n_var_vn: float
    n_cov_tv: float
    g_bias_n: float
    g_var_n: float
    alpha_bias_n: float
    alpha_var_n: float
    sigma2_bias_n: float
    sigma2_var_n: float

    def to_dict(self) -> dict:
        return {
            "e_tn": self.e_tn,
            "e_vn": self.e_vn,
            "n_var_tn": self.n_var_tn,
            "n_var_vn": self.n_var_vn,
            "n_cov_tv": self.n_cov_tv,
            "g_bias_n": self.g_bias_n,
            "g_var_n": self.g_var_n,
            "alpha_bias_n": self.alpha_bias_n,
            "alpha_var_n": self.alpha_var_n,
            "sigma2_bias_n": self.sigma2_bias_n,
            "sigma2_var_n": self.sigma2_var_n,
        }

    CSV_FIELDS = ("e_tn", "e_vn", "n_var_tn", "n_var_vn", "n_cov_tv",
                  "g_bias_n", "g_var_n", "alpha_bias_n", "alpha_var_n",
                  "sigma2_bias_n", "sigma2_var_n")

    def to_csv_row(self) -> str:
        return ",".join(repr(float(getattr(self, f))) for f in self.CSV_FIELDS)


def proposition1(params: ProcessParams, law: SpacingLaw, n: int) -> dict:
    """Mean of the sample moments (exact at finite n) and the limits of
    n*Var(T_n), n*Var(V_n) and n*Cov(T_n, V_n)."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    eta = params.eta
    g = law.laplace(params.alpha)
    g2 = law.laplace(2.0 * params.alpha)
    r = law.renewal_integral(2.0 * params.alpha)
    return {
        "e_tn": (1.0 - 1.0 / n) * eta * g,
        "e_vn": eta,
        "n_var_tn": eta ** 2 * (1.0 + g2 + 4.0 * g * g * (1.0 + r)),
        "n_var_vn": eta ** 2 * (2.0 + 4.0 * r),
        "n_cov_tv": eta ** 2 * 4.0 * g * (1.0 + r),
    }


def proposition2(params: ProcessParams, law: SpacingLaw):
    """Limits of n*bias and n*Var of the moment ratio g_hat = T_n/V_n."""
    g = law.laplace(params.alpha)
    g2 = law.laplace(2.0 * params.alpha)
    return -3.0 * g, 1.0 + g2 - 2.0 * g * g


def _g_pack(alpha: float, law: SpacingLaw):
    g = law.laplace(alpha)
    d1 = law.laplace_d1(alpha)
    d2 = law.laplace_d2(alpha)
    b = 1.0 + law.laplace(2.0 * alpha) - 2.0 * g * g
    return g, d1, d2, b


def drift_bias_limit(alpha: float, law: SpacingLaw) -> float:
    """Limit of n*(E[alpha_hat] - alpha)."""
    g, d1, d2, b = _g_pack(alpha, law)
    return -3.0 * g / d1 - d2 * b / (2.0 * d1 ** 3)


def drift_variance_limit(alpha: float, law: SpacingLaw) -> float:
    """Limit of n*Var(alpha_hat)."""
    g, d1, d2, b = _g_pack(alpha, law)
    return b / (d1 * d1)


def theorem1(params: ProcessParams, law: SpacingLaw, n: int | None = None) -> AsymptoticSummary:
    """Full asymptotic summary for the moment estimator under ``law``.

    When ``n`` is given, ``e_tn`` carries its exact finite-n value
    (1 - 1/n)*eta*g; otherwise the limit eta*g is reported.
    """
    alpha, eta = params.alpha, params.eta
    g, d1, d2, b = _g_pack(alpha, law)
    g2 = law.laplace(2.0 * alpha)
    r = law.renewal_integral(2.0 * alpha)
    curv = -d2 * b / (2.0 * d1 ** 3)
    alpha_bias = -3.0 * g / d1 + curv
    alpha_var = b / (d1 * d1)
    sigma2_bias = 2.0 * eta * (-g / d1 + curv)
    sigma2_var = 4.0 * eta ** 2 * (
        2.0 * alpha ** 2 + 4.0 * alpha ** 2 * r + 4.0 * alpha * g / d1 + alpha_var
    )
    factor = 1.0 if n is None else 1.0 - 1.0 / n
    return AsymptoticSummary(
        e_tn=factor * eta * g,
        e_vn=eta,
        n_var_tn=eta ** 2 * (1.0 + g2 + 4.0 * g * g * (1.0 + r)),
        n_var_vn=eta ** 2 * (2.0 + 4.0 * r),
        n_cov_tv=eta ** 2 * 4.0 * g * (1.0 + r),
        g_bias_n=-3.0 * g,
        g_var_n=b,
        alpha_bias_n=alpha_bias,
        alpha_var_n=alpha_var,
        sigma2_bias_n=sigma2_bias,
        sigma2_var_n=sigma2_var,
    )


def exponential_case(alpha: float, beta: float):
    """Rational closed forms of the drift bias/variance limits for Poisson
    sampling at rate ``beta``; independent oracle for ``theorem1``."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    denom = beta ** 2 * (beta + 2.0 * alpha)
    bias = (beta + alpha) * (
        2.0 * alpha ** 3 + 3.0 * beta ** 3
        + 8.0 * alpha * beta ** 2 + 6.0 * alpha ** 2 * beta
    ) / denom
    var = 2.0 * alpha * (beta + alpha) ** 2 * (
        beta ** 2 + alpha ** 2 + 3.0 * alpha * beta
    ) / denom
    return bias, var

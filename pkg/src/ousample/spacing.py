"""Inter-sample spacing laws and their Laplace-transform functionals.

A spacing law describes the distribution of the gaps between consecutive
sampling times. Everything the moment estimator and the asymptotic
bias/variance formulas need from the sampling mechanism is a functional of
this distribution: the Laplace transform g(s) = E[exp(-s*Delta)], its first
two derivatives, and the exponentially weighted integral of the renewal
density, which collapses to the geometric sum g(s)/(1 - g(s)).

Three laws are supported:

* ``UniformSpacing(delta)`` -- degenerate spacing, every gap equals delta.
* ``ExponentialSpacing(beta)`` -- Poisson sampling at rate beta.
* ``ShiftedExponentialSpacing(delta, beta)`` -- exponential gaps with a hard
  minimum separation delta ("truncated exponential").
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpacingLaw",
    "UniformSpacing",
    "ExponentialSpacing",
    "ShiftedExponentialSpacing",
    "LaplaceRangeError",
    "spacing_law_from_config",
]


class LaplaceRangeError(ValueError):
    """Requested inverse-Laplace target lies outside the open interval (0, 1)."""


def _check_s(s: float) -> float:
    s = float(s)
    if not s > 0.0:
        raise ValueError(f"Laplace argument must be positive, got {s}")
    return s


def _unit_gauss_legendre(points: int):
    # Gauss-Legendre nodes/weights mapped from [-1, 1] to (0, 1).
    x, w = np.polynomial.legendre.leggauss(points)
    return 0.5 * (x + 1.0), 0.5 * w


class SpacingLaw(abc.ABC):
    """Distribution of i.i.d. gaps between consecutive sampling times."""

    #: left end of the support of the density (0 unless the law is shifted)
    support_start: float = 0.0

    @abc.abstractmethod
    def mean(self) -> float:
        """Mean spacing E[Delta]; finite for every supported law."""

    @abc.abstractmethod
    def laplace(self, s: float) -> float:
        """Laplace transform g(s) = E[exp(-s*Delta)], strictly in (0, 1)."""

    @abc.abstractmethod
    def laplace_d1(self, s: float) -> float:
        """First derivative g'(s) = -E[Delta * exp(-s*Delta)] < 0."""

    @abc.abstractmethod
    def laplace_d2(self, s: float) -> float:
        """Second derivative g''(s) = E[Delta^2 * exp(-s*Delta)] > 0."""

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator, size=None):
        """Draw spacings using the caller-supplied generator."""

    @abc.abstractmethod
    def to_config(self) -> dict:
        """JSON-serializable description, invertible by spacing_law_from_config."""

    def density(self, v):
        """Probability density f(v); not defined for degenerate laws."""
        raise NotImplementedError(f"{type(self).__name__} has no density")

    def renewal_integral(self, s: float) -> float:
        """Integral of exp(-s*v) against the renewal density H(v).

        H is the sum over k >= 1 of the k-fold convolutions of the spacing
        density; each convolution transforms to g(s)**k, so the integral is
        the geometric sum g/(1 - g).
        """
        g = self.laplace(_check_s(s))
        return g / (1.0 - g)

    def laplace_quadrature(self, s: float, points: int = 64) -> float:
        """Numeric evaluation of g(s) by quadrature against the density.

        Independent of the closed-form ``laplace``; used as a cross-check and
        by the finite-n Monte Carlo oracle. The semi-infinite support is
        mapped onto (0, 1) via v = a + t/(1-t).
        """
        s = _check_s(s)
        t, w = _unit_gauss_legendre(points)
        v = self.support_start + t / (1.0 - t)
        jac = 1.0 / (1.0 - t) ** 2
        return float(np.sum(w * np.exp(-s * v) * self.density(v) * jac))

    def inverse_laplace(self, y: float, rtol: float = 1e-12, max_iter: int = 200) -> float:
        """Unique s > 0 with g(s) = y, for y in (0, 1).

        Bracket by doubling from (1e-12, 1), then safeguarded Newton with
        bisection fallback. Uniqueness follows from strict monotonicity.
        """
        y = float(y)
        if not 0.0 < y < 1.0:
            raise LaplaceRangeError(
                f"inverse Laplace target must lie in (0, 1), got {y}"
            )
        lo, hi = 1e-12, 1.0
        while self.laplace(hi) > y:
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise LaplaceRangeError(f"no positive solution for target {y}")
        while self.laplace(lo) < y:
            lo *= 0.5
            if lo < 5e-324:
                raise LaplaceRangeError(f"no positive solution for target {y}")
        s = 0.5 * (lo + hi)
        for _ in range(max_iter):
            g = self.laplace(s)
            if g > y:
                lo = s
            else:
                hi = s
            nxt = s - (g - y) / self.laplace_d1(s)
            if not lo < nxt < hi:
                nxt = 0.5 * (lo + hi)
            if abs(nxt - s) <= rtol * abs(nxt):
                return nxt
            s = nxt
        return s


@dataclass(frozen=True)
class UniformSpacing(SpacingLaw):
    """Degenerate spacing: every gap equals ``delta`` exactly."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    def mean(self) -> float:
        return self.delta

    def laplace(self, s: float) -> float:
        return math.exp(-_check_s(s) * self.delta)

    def laplace_d1(self, s: float) -> float:
        return -self.delta * math.exp(-_check_s(s) * self.delta)

    def laplace_d2(self, s: float) -> float:
        return self.delta ** 2 * math.exp(-_check_s(s) * self.delta)

    def laplace_quadrature(self, s: float, points: int = 64) -> float:
        # Point mass: the integral is exact, no quadrature involved.
        return self.laplace(s)

    def inverse_laplace(self, y: float, rtol: float = 1e-12, max_iter: int = 200) -> float:
        if not 0.0 < y < 1.0:
            raise LaplaceRangeError(
                f"inverse Laplace target must lie in (0, 1), got {y}"
            )
        return -math.log(y) / self.delta

    def sample(self, rng: np.random.Generator, size=None):
        if size is None:
            return self.delta
        return np.full(size, self.delta)

    def to_config(self) -> dict:
        return {"kind": "uniform", "delta": self.delta}


@dataclass(frozen=True)
class ExponentialSpacing(SpacingLaw):
    """Exponential gaps with rate ``beta`` (Poisson process sampling)."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    def mean(self) -> float:
        return 1.0 / self.beta

    def density(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v >= 0.0, self.beta * np.exp(-self.beta * v), 0.0)

    def laplace(self, s: float) -> float:
        return self.beta / (self.beta + _check_s(s))

    def laplace_d1(self, s: float) -> float:
        return -self.beta / (self.beta + _check_s(s)) ** 2

    def laplace_d2(self, s: float) -> float:
        return 2.0 * self.beta / (self.beta + _check_s(s)) ** 3

    def inverse_laplace(self, y: float, rtol: float = 1e-12, max_iter: int = 200) -> float:
        if not 0.0 < y < 1.0:
            raise LaplaceRangeError(
                f"inverse Laplace target must lie in (0, 1), got {y}"
            )
        return self.beta * (1.0 - y) / y

    def renewal_integral(self, s: float) -> float:
        # H(v) = beta for a Poisson process, so the integral is beta/s exactly.
        return self.beta / _check_s(s)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(scale=1.0 / self.beta, size=size)

    def to_config(self) -> dict:
        return {"kind": "exponential", "beta": self.beta}


@dataclass(frozen=True)
class ShiftedExponentialSpacing(SpacingLaw):
    """Exponential gaps shifted by a hard minimum separation ``delta``.

    ``delta = 0`` reduces to ``ExponentialSpacing(beta)`` on every operation.
    """

    delta: float
    beta: float

    def __post_init__(self):
        if self.delta < 0.0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "support_start", self.delta)

    def mean(self) -> float:
        return self.delta + 1.0 / self.beta

    def density(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(
            v >= self.delta,
            self.beta * np.exp(-self.beta * (v - self.delta)),
            0.0,
        )

    def laplace(self, s: float) -> float:
        s = _check_s(s)
        return self.beta * math.exp(-s * self.delta) / (self.beta + s)

    def laplace_d1(self, s: float) -> float:
        s = _check_s(s)
        b = self.beta + s
        return -self.beta * math.exp(-s * self.delta) * (self.delta * b + 1.0) / b ** 2

    def laplace_d2(self, s: float) -> float:
        s = _check_s(s)
        b = self.beta + s
        num = self.delta ** 2 * b ** 2 + 2.0 * self.delta * b + 2.0
        return self.beta * math.exp(-s * self.delta) * num / b ** 3

    def sample(self, rng: np.random.Generator, size=None):
        return self.delta + rng.exponential(scale=1.0 / self.beta, size=size)

    def to_config(self) -> dict:
        return {"kind": "truncated", "delta": self.delta, "beta": self.beta}


_LAW_ALIASES = {
    "uniform": "uniform",
    "exponential": "exponential",
    "poisson": "exponential",
    "truncated": "truncated",
    "shifted_exponential": "truncated",
    "shifted-exponential": "truncated",
    "truncated_exponential": "truncated",
}


def spacing_law_from_config(config: dict) -> SpacingLaw:
    """Build a spacing law from a ``{"kind": ..., ...}`` mapping."""
    if "kind" not in config:
        raise ValueError("spacing law config requires a 'kind' field")
    kind = _LAW_ALIASES.get(str(config["kind"]).lower())
    if kind is None:
        raise ValueError(f"unknown spacing law kind {config['kind']!r}")
    if kind == "uniform":
        if "delta" not in config:
            raise ValueError("uniform spacing law requires 'delta'")
        return UniformSpacing(delta=float(config["delta"]))
    if kind == "exponential":
        if "beta" not in config:
            raise ValueError("exponential spacing law requires 'beta'")
        return ExponentialSpacing(beta=float(config["beta"]))
    if "beta" not in config:
        raise ValueError("truncated spacing law requires 'beta'")
    return ShiftedExponentialSpacing(
        delta=float(config.get("delta", 0.0)), beta=float(config["beta"])
    )

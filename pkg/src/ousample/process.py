"""Exact simulation of a stationary OU process at stochastic sampling times.

The conditional law of the process at the next sampling time is Gaussian with
mean x * exp(-alpha*dt) and variance eta * (1 - exp(-2*alpha*dt)), where
eta = sigma^2 / (2*alpha) is the stationary variance, so paths carry no
discretization error regardless of how irregular the sampling times are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spacing import SpacingLaw

__all__ = ["ProcessParams", "SampledPath", "transition", "simulate", "simulate_ensemble"]


@dataclass(frozen=True)
class ProcessParams:
    """OU parameters: drift ``alpha`` (mean-reversion rate) and innovation
    variance ``sigma2``. The stationary variance ``eta`` is always derived."""

    alpha: float
    sigma2: float

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.sigma2 > 0.0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def eta(self) -> float:
        return self.sigma2 / (2.0 * self.alpha)


@dataclass
class SampledPath:
    """Observation times and process values, one value per time."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.ndim != 1 or self.values.ndim != 1:
            raise ValueError("times and values must be one-dimensional")
        if self.times.shape != self.values.shape:
            raise ValueError(
                f"length mismatch: {self.times.size} times, {self.values.size} values"
            )
        if self.times.size < 2:
            raise ValueError(f"a sampled path needs n >= 2 points, got {self.times.size}")
        if not np.all(np.diff(self.times) > 0.0):
            raise ValueError("times must be strictly increasing")

    @property
    def n(self) -> int:
        return self.times.size

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.times)

    def to_csv(self, stream, metadata: dict | None = None) -> None:
        """Write ``t,x`` rows in shortest round-trip float formatting, after
        optional ``# key=value`` metadata comment lines."""
        if metadata:
            for key, value in metadata.items():
                stream.write(f"# {key}={value}\n")
        stream.write("t,x\n")
        for t, x in zip(self.times, self.values):
            stream.write(f"{float(t)!r},{float(x)!r}\n")

    @classmethod
    def from_csv(cls, stream) -> "SampledPath":
        times, values = [], []
        header_seen = False
        for lineno, line in enumerate(stream, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                if line != "t,x":
                    raise ValueError(f"line {lineno}: expected header 't,x', got {line!r}")
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected two fields, got {line!r}")
            try:
                times.append(float(parts[0]))
                values.append(float(parts[1]))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if not header_seen:
            raise ValueError("missing 't,x' header")
        return cls(np.asarray(times), np.asarray(values))


def transition(params: ProcessParams, x_prev: float, dt: float, gaussian_draw: float) -> float:
    """One exact conditional step of length ``dt`` driven by a standard
    normal draw."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    decay = math.exp(-params.alpha * dt)
    sd = math.sqrt(params.eta * -math.expm1(-2.0 * params.alpha * dt))
    return x_prev * decay + sd * gaussian_draw


def simulate(params: ProcessParams, law: SpacingLaw, n: int, seed) -> SampledPath:
    """Simulate ``n`` observations starting from the stationary distribution.

    The first time is 0 and subsequent times accumulate i.i.d. spacings from
    ``law``. Fully deterministic given ``seed``: the PCG64 generator draws the
    n-1 spacings first, then the n standard normal innovations. ``seed`` may
    be an integer or a sequence (used to derive independent replicate
    streams as ``(base_seed, replicate)``).
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    rng = np.random.default_rng(seed)
    dts = np.asarray(law.sample(rng, n - 1), dtype=float)
    z = rng.standard_normal(n)
    times = np.empty(n)
    times[0] = 0.0
    np.cumsum(dts, out=times[1:])
    decay = np.exp(-params.alpha * dts)
    sd = np.sqrt(params.eta * -np.expm1(-2.0 * params.alpha * dts))
    x = np.empty(n)
    prev = math.sqrt(params.eta) * z[0]
    x[0] = prev
    for i in range(1, n):
        prev = prev * decay[i - 1] + sd[i - 1] * z[i]
        x[i] = prev
    return SampledPath(times, x)


def simulate_ensemble(params: ProcessParams, law: SpacingLaw, n: int,
                      replicates: int, seed):
    """Simulate many short paths from a single stream, vectorized.

    Returns ``(times, values)`` arrays of shape (replicates, n). Intended for
    bulk moment studies; unlike the replicate harness, all paths share one
    generator, so individual rows are not addressable by seed.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if replicates < 1:
        raise ValueError(f"replicates must be positive, got {replicates}")
    rng = np.random.default_rng(seed)
    dts = np.asarray(law.sample(rng, (replicates, n - 1)), dtype=float)
    z = rng.standard_normal((replicates, n))
    times = np.zeros((replicates, n))
    np.cumsum(dts, axis=1, out=times[:, 1:])
    decay = np.exp(-params.alpha * dts)
    sd = np.sqrt(params.eta * -np.expm1(-2.0 * params.alpha * dts))
    values = np.empty((replicates, n))
    values[:, 0] = math.sqrt(params.eta) * z[:, 0]
    for i in range(1, n):
        values[:, i] = values[:, i - 1] * decay[:, i - 1] + sd[:, i - 1] * z[:, i]
    return times, values

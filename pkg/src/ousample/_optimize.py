"""One-dimensional minimization helpers shared by the estimators and the
sampling-rate design module."""

from __future__ import annotations

import math

__all__ = ["golden_section", "grid_then_golden"]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, xtol_abs=None, xtol_rel=None, max_iter=500):
    """Minimize a unimodal scalar function on [lo, hi] by golden section.

    Returns ``(x, f(x), iterations)``. Termination is on the bracket width:
    absolute tolerance ``xtol_abs``, relative tolerance ``xtol_rel``, or both.
    """
    if not hi > lo:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    if xtol_abs is None and xtol_rel is None:
        xtol_abs = 1e-10

    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while it < max_iter:
        width = b - a
        tol = 0.0
        if xtol_abs is not None:
            tol = max(tol, xtol_abs)
        if xtol_rel is not None:
            tol = max(tol, xtol_rel * max(abs(a), abs(b)))
        if width <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
        it += 1
    x = x1 if f1 <= f2 else x2
    fx = min(f1, f2)
    return x, fx, it


def grid_then_golden(f, lo, hi, grid_points=200, log_scale=True,
                     xtol_abs=None, xtol_rel=None):
    """Bracket the minimizer on a coarse grid, then refine by golden section.

    Returns ``(x, f(x), scan, at_boundary)`` where ``scan`` is the list of
    ``(grid point, objective)`` pairs and ``at_boundary`` marks a minimum in
    the first or last grid cell.
    """
    if not hi > lo:
        raise ValueError(f"invalid bounds [{lo}, {hi}]")
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    if log_scale:
        if not lo > 0.0:
            raise ValueError("log-scaled grid requires positive bounds")
        grid = [math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * i / (grid_points - 1))
                for i in range(grid_points)]
    else:
        grid = [lo + (hi - lo) * i / (grid_points - 1) for i in range(grid_points)]
    vals = [f(x) for x in grid]
    i = min(range(grid_points), key=vals.__getitem__)
    at_boundary = i == 0 or i == grid_points - 1
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid_points - 1)]
    x, fx, _ = golden_section(f, a, b, xtol_abs=xtol_abs, xtol_rel=xtol_rel)
    if vals[i] < fx:
        x, fx = grid[i], vals[i]
    return x, fx, list(zip(grid, vals)), at_boundary

"""Command-line interface.

Subcommands: ``simulate``, ``estimate``, ``asymptotics``, ``design``
(``point`` | ``curve`` | ``minimax``) and ``validate``. Options may come from
a JSON config file (``--config``) with explicit flags taking precedence; the
effective configuration is echoed into every output artifact so results are
self-describing. Exit codes: 0 success, 1 usage/validation, 2 estimation
failure, 3 I/O.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .asymptotics import theorem1
from .design import (DEFAULT_BETA_BOUNDS, DesignProblem, minimax_relative_bias,
                     optimize_rate, rate_curve)
from .estimators import mle_numeric, mle_uniform, moment_estimate
from .montecarlo import ExperimentConfig, evaluate_report, run_experiment
from .process import ProcessParams, SampledPath, simulate
from .spacing import spacing_law_from_config

OUTPUT_DIR_ENV = "OUSAMPLE_OUTPUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ESTIMATION = 2
EXIT_IO = 3


class ValidationFailure(Exception):
    """Bad arguments or config; maps to exit code 1."""


class EstimationFailure(Exception):
    """The estimator reported a data-driven failure; maps to exit code 2."""


VALIDATE_PRESETS = {
    "paper-exponential": {
        "alpha": 1.0, "sigma2": 2.0,
        "law": {"kind": "exponential", "beta": 1.0},
        "n": 2000, "replicates": 2000, "seed": 20260823,
    },
    "truncated-0.5": {
        "alpha": 1.0, "sigma2": 2.0,
        "law": {"kind": "truncated", "delta": 0.5, "beta": 1.0},
        "n": 2000, "replicates": 2000, "seed": 20260823,
    },
}


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"config {path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ValidationFailure(f"config {path}: top level must be an object")
    return cfg


def _pick(flag, config, *keys, default=None):
    # flags win over the config file, which wins over the default
    if flag is not None:
        return flag
    node = config
    for key in keys:
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def _require(value, name):
    if value is None:
        raise ValidationFailure(f"missing required option: {name}")
    return value


def _law_from_options(config, law, beta, delta):
    cfg = dict(config.get("law", {})) if isinstance(config.get("law"), dict) else {}
    if law is not None:
        cfg["kind"] = law
    if beta is not None:
        cfg["beta"] = beta
    if delta is not None:
        cfg["delta"] = delta
    if "kind" not in cfg:
        raise ValidationFailure("missing required option: --law")
    try:
        return spacing_law_from_config(cfg)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None


def _params_from_options(config, alpha, sigma2):
    alpha = _require(_pick(alpha, config, "process", "alpha"), "--alpha")
    sigma2 = _require(_pick(sigma2, config, "process", "sigma2"), "--sigma2")
    try:
        return ProcessParams(alpha=float(alpha), sigma2=float(sigma2))
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None


def _resolve_out(path):
    path = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _meta(effective: dict) -> dict:
    return {"tool": f"ousample {__version__}", **effective}


def _emit_json(obj: dict, out) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        _resolve_out(out).write_text(text)


@click.group(name="ousample")
@click.version_option(version=__version__)
def cli():
    """Simulation, estimation and sampling design for stochastically
    sampled continuous-time AR(1) processes."""


@cli.command(name="simulate")
@click.option("--config", "config_path", type=click.Path(), help="JSON config file.")
@click.option("--alpha", type=float, help="Drift parameter (> 0).")
@click.option("--sigma2", type=float, help="Innovation variance (> 0).")
@click.option("--law", type=str, help="Spacing law kind: uniform, exponential, truncated.")
@click.option("--beta", type=float, help="Spacing rate (exponential/truncated).")
@click.option("--delta", type=float, help="Spacing shift / uniform spacing.")
@click.option("--n", type=int, help="Number of observations (>= 2).")
@click.option("--seed", type=int, help="PRNG seed.")
@click.option("--out", type=click.Path(), required=True, help="Output CSV path.")
def simulate_cmd(config_path, alpha, sigma2, law, beta, delta, n, seed, out):
    """Simulate a sampled path and write it as t,x CSV."""
    config = _load_config(config_path)
    params = _params_from_options(config, alpha, sigma2)
    spacing = _law_from_options(config, law, beta, delta)
    n = _require(_pick(n, config, "n"), "--n")
    seed = _require(_pick(seed, config, "seed"), "--seed")
    if n < 2:
        raise ValidationFailure(f"n must be at least 2, got {n}")
    path = simulate(params, spacing, int(n), int(seed))
    meta = _meta({
        "alpha": params.alpha, "sigma2": params.sigma2,
        "law": json.dumps(spacing.to_config(), sort_keys=True),
        "n": int(n), "seed": int(seed),
    })
    with open(_resolve_out(out), "w") as fh:
        path.to_csv(fh, metadata=meta)
    span = path.times[-1] - path.times[0]
    click.echo(f"n={path.n} span={span:.6g} sample_var={path.values.var(ddof=1):.6g}")


@cli.command(name="estimate")
@click.option("--config", "config_path", type=click.Path(), help="JSON config file.")
@click.option("--input", "input_path", type=click.Path(), required=True,
              help="Path CSV produced by the simulate command.")
@click.option("--method", type=click.Choice(["moment", "mle-uniform", "mle-numeric"]),
              default="moment", show_default=True)
@click.option("--law", type=str, help="Spacing law kind (moment method).")
@click.option("--beta", type=float, help="Spacing rate (moment method).")
@click.option("--delta", type=float,
              help="Spacing shift (moment) / uniform spacing (mle-uniform).")
@click.option("--out", type=click.Path(), help="Output JSON path (default: stdout).")
def estimate_cmd(config_path, input_path, method, law, beta, delta, out):
    """Estimate drift and innovation variance from a path CSV."""
    config = _load_config(config_path)
    try:
        with open(input_path) as fh:
            path = SampledPath.from_csv(fh)
    except ValueError as exc:
        raise ValidationFailure(f"{input_path}: {exc}") from None

    if method == "moment":
        spacing = _law_from_options(config, law, beta, delta)
        report = moment_estimate(path, spacing)
    elif method == "mle-uniform":
        delta = _require(_pick(delta, config, "law", "delta"), "--delta")
        try:
            report = mle_uniform(path, float(delta))
        except ValueError as exc:
            raise ValidationFailure(str(exc)) from None
    else:
        try:
            report = mle_numeric(path)
        except ValueError as exc:
            raise ValidationFailure(str(exc)) from None

    payload = {"meta": _meta({"input": str(input_path), "method": method}),
               "report": report.to_dict()}
    _emit_json(payload, out)
    if not report.ok:
        raise EstimationFailure(report.status)


@cli.command(name="asymptotics")
@click.option("--config", "config_path", type=click.Path(), help="JSON config file.")
@click.option("--alpha", type=float)
@click.option("--sigma2", type=float)
@click.option("--law", type=str)
@click.option("--beta", type=float)
@click.option("--delta", type=float)
@click.option("--n", type=int, help="Optional sample size for the exact E[T_n].")
@click.option("--out", type=click.Path(), help="Output JSON path (default: stdout).")
def asymptotics_cmd(config_path, alpha, sigma2, law, beta, delta, n, out):
    """Evaluate the asymptotic bias/variance constants."""
    config = _load_config(config_path)
    params = _params_from_options(config, alpha, sigma2)
    spacing = _law_from_options(config, law, beta, delta)
    n = _pick(n, config, "n")
    summary = theorem1(params, spacing, n=None if n is None else int(n))
    payload = {
        "meta": _meta({
            "alpha": params.alpha, "sigma2": params.sigma2,
            "law": spacing.to_config(), "n": n,
        }),
        "summary": summary.to_dict(),
    }
    _emit_json(payload, out)


@cli.group(name="design")
def design_group():
    """Optimal average sampling rate problems."""


def _beta_bounds(config, beta_lo, beta_hi):
    cfg = config.get("beta_bounds")
    cfg_lo, cfg_hi = (cfg if isinstance(cfg, (list, tuple)) and len(cfg) == 2
                      else DEFAULT_BETA_BOUNDS)
    lo = beta_lo if beta_lo is not None else cfg_lo
    hi = beta_hi if beta_hi is not None else cfg_hi
    return float(lo), float(hi)


_CRITERION_MAP = {"bias": "abs_bias", "variance": "variance"}


@design_group.command(name="point")
@click.option("--config", "config_path", type=click.Path())
@click.option("--criterion", type=click.Choice(["bias", "variance"]), required=True)
@click.option("--law", type=str, default="exponential", show_default=True)
@click.option("--delta", type=float, default=0.0, show_default=True)
@click.option("--alpha", type=float, required=True)
@click.option("--beta-lo", type=float)
@click.option("--beta-hi", type=float)
@click.option("--out", type=click.Path())
def design_point(config_path, criterion, law, delta, alpha, beta_lo, beta_hi, out):
    """Optimal rate for a single drift value."""
    config = _load_config(config_path)
    bounds = _beta_bounds(config, beta_lo, beta_hi)
    family = "truncated" if law in ("truncated", "shifted_exponential") else "exponential"
    try:
        sol = optimize_rate(DesignProblem(
            family=family, criterion=_CRITERION_MAP[criterion],
            alpha=alpha, delta=delta, beta_bounds=bounds,
        ))
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
    payload = {
        "meta": _meta({"family": family, "criterion": criterion, "alpha": alpha,
                       "delta": delta, "beta_bounds": list(bounds)}),
        "solution": sol.to_dict(),
    }
    _emit_json(payload, out)


def _parse_grid(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationFailure(f"grid must be lo:hi:count, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationFailure(f"grid must be lo:hi:count, got {spec!r}") from None
    if not (0.0 < lo <= hi) or count < 1:
        raise ValidationFailure(f"invalid grid {spec!r}")
    if count == 1:
        return [lo]
    ratio = (hi / lo) ** (1.0 / (count - 1))
    return [lo * ratio ** i for i in range(count)]


@design_group.command(name="curve")
@click.option("--config", "config_path", type=click.Path())
@click.option("--criterion", type=click.Choice(["bias", "variance"]), required=True)
@click.option("--law", type=str, default="exponential", show_default=True)
@click.option("--delta", type=float, default=0.0, show_default=True)
@click.option("--alpha-grid", type=str, required=True, help="Log grid lo:hi:count.")
@click.option("--beta-lo", type=float)
@click.option("--beta-hi", type=float)
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
def design_curve(config_path, criterion, law, delta, alpha_grid, beta_lo, beta_hi, out_dir):
    """Optimal-rate curve over a drift grid; writes one CSV per curve."""
    config = _load_config(config_path)
    bounds = _beta_bounds(config, beta_lo, beta_hi)
    family = "truncated" if law in ("truncated", "shifted_exponential") else "exponential"
    grid = _parse_grid(alpha_grid)
    rows = rate_curve(family, _CRITERION_MAP[criterion], grid, delta=delta,
                      beta_bounds=bounds)
    if family == "exponential":
        name = f"figure1_{criterion}.csv"
    else:
        name = f"figure2_delta{delta:g}_{criterion}.csv"
    out_path = _resolve_out(Path(out_dir) / name)
    with open(out_path, "w") as fh:
        for key, value in _meta({
            "family": family, "criterion": criterion, "delta": delta,
            "alpha_grid": alpha_grid, "beta_bounds": json.dumps(list(bounds)),
        }).items():
            fh.write(f"# {key}={value}\n")
        fh.write("alpha,criterion,beta_star,objective,status\n")
        for row in rows:
            fh.write(f"{row['alpha']!r},{row['criterion']},{row['beta_star']!r},"
                     f"{row['objective']!r},{row['status']}\n")
    click.echo(str(out_path))


@design_group.command(name="minimax")
@click.option("--config", "config_path", type=click.Path())
@click.option("--law", type=str, default="exponential", show_default=True)
@click.option("--delta", type=float, default=0.0, show_default=True)
@click.option("--alpha-lo", type=float, required=True)
@click.option("--alpha-hi", type=float, required=True)
@click.option("--beta-lo", type=float)
@click.option("--beta-hi", type=float)
@click.option("--grid-size", type=int, default=200, show_default=True)
@click.option("--out", type=click.Path())
def design_minimax(config_path, law, delta, alpha_lo, alpha_hi, beta_lo, beta_hi,
                   grid_size, out):
    """Rate minimizing the worst relative bias over a drift interval."""
    config = _load_config(config_path)
    bounds = _beta_bounds(config, beta_lo, beta_hi)
    family = "truncated" if law in ("truncated", "shifted_exponential") else "exponential"
    try:
        sol = minimax_relative_bias(family, (alpha_lo, alpha_hi), delta=delta,
                                    beta_bounds=bounds, grid_size=grid_size)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
    payload = {
        "meta": _meta({"family": family, "criterion": "minimax_relative_bias",
                       "alpha_interval": [alpha_lo, alpha_hi], "delta": delta,
                       "beta_bounds": list(bounds), "grid_size": grid_size}),
        "solution": sol.to_dict(),
    }
    _emit_json(payload, out)


@cli.command(name="validate")
@click.option("--preset", type=str, required=True,
              help="One of: " + ", ".join(sorted(VALIDATE_PRESETS)))
@click.option("--n", type=int, help="Override the preset path length.")
@click.option("--replicates", type=int, help="Override the preset replicate count.")
@click.option("--seed", type=int, help="Override the preset base seed.")
@click.option("--workers", type=int, default=1, show_default=True,
              help="Worker threads; does not affect the report content.")
@click.option("--out", type=click.Path(), help="Output JSON path (default: stdout).")
@click.option("--replicates-csv", type=click.Path(),
              help="Optional per-replicate estimate CSV.")
def validate_cmd(preset, n, replicates, seed, workers, out, replicates_csv):
    """Run a Monte Carlo validation experiment against the theory."""
    if preset not in VALIDATE_PRESETS:
        raise ValidationFailure(
            f"unknown preset {preset!r}; available: " + ", ".join(sorted(VALIDATE_PRESETS))
        )
    spec = dict(VALIDATE_PRESETS[preset])
    if n is not None:
        spec["n"] = n
    if replicates is not None:
        spec["replicates"] = replicates
    if seed is not None:
        spec["seed"] = seed
    config = ExperimentConfig(
        params=ProcessParams(alpha=spec["alpha"], sigma2=spec["sigma2"]),
        law=spacing_law_from_config(spec["law"]),
        n=spec["n"], replicates=spec["replicates"], base_seed=spec["seed"],
    )
    log = open(_resolve_out(replicates_csv), "w") if replicates_csv else None
    try:
        report = run_experiment(config, workers=max(1, workers), replicate_log=log)
    finally:
        if log is not None:
            log.close()
    checks = evaluate_report(report)
    for check in checks:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(
            f"[{status}] {check['name']}: empirical={check['empirical']:.6g} "
            f"target={check['theoretical']:.6g} tol={check['tolerance']:.3g}"
        )
    payload = {
        "meta": _meta({"preset": preset}),
        "report": report.to_dict(),
        "checks": checks,
    }
    _emit_json(payload, out)


def main(argv=None) -> int:
    """Console entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except ValidationFailure as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except EstimationFailure as exc:
        click.echo(f"estimation failed: {exc}", err=True)
        return EXIT_ESTIMATION
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

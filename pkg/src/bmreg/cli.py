"""Command-line surface: dataset generation, fitting, sweeps, the
contraction-rate study, and kernel self-checks.

Every option can also come from a JSON config file (--config); explicit
flags override file values, which override the built-in defaults.  Exit
codes: 0 success, 1 failed self-check, 2 configuration error, 3 runtime
failure during inference or I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from bmreg.checks import run_checks
from bmreg.data import Dataset
from bmreg.experiments import (
    CSV_HEADER,
    DEFAULTS,
    ExperimentResult,
    default_truth,
    run_contract,
    run_sweep,
    write_rows,
)
from bmreg.inference import AnnealConfig, anneal_map, fit_cbm
from bmreg.kernel_regression import KernelFit
from bmreg.manifolds import make_manifold
from bmreg.metrics import (
    PredictorDensity,
    dq_distance,
    generate_dataset,
    theorem_rate_sidelength,
)
from bmreg.paths import PriorSpec
from bmreg.posterior import KnownVariance, MarginalVariance

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_FAILURE = 3

_MANIFOLDS = ("circle", "sphere", "torus")
_METHODS = ("dbm", "cbm", "ker")

_DEFAULTS = {
    "manifold": DEFAULTS["manifold"],
    "method": "dbm",
    "n": DEFAULTS["n"],
    "sigma2": DEFAULTS["sigma2"],
    "marginal_A": None,
    "c": DEFAULTS["c"],
    "grid_K": None,
    "rate_epsilon": None,
    "seed": 0,
    "replicates": 10,
    "out": None,
    "anneal_t0": None,
    "anneal_cool": None,
    "anneal_steps": None,
    "workers": 1,
    "axis": None,
    "values": None,
    "n_values": None,
}

_INT_KEYS = {"n", "grid_K", "seed", "replicates", "anneal_steps", "workers"}
_FLOAT_KEYS = {"sigma2", "marginal_A", "c", "rate_epsilon", "anneal_t0", "anneal_cool"}


class ConfigError(ValueError):
    """Bad option value or combination; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Validated options shared by the run commands."""

    manifold: str
    method: str
    n: int
    sigma2: float
    marginal_A: float | None
    c: float
    grid_K: int | None
    rate_epsilon: float | None
    seed: int
    replicates: int
    out: str | None
    anneal_t0: float | None
    anneal_cool: float | None
    anneal_steps: int | None
    workers: int

    def __post_init__(self):
        if self.manifold not in _MANIFOLDS:
            raise ConfigError(f"manifold must be one of {_MANIFOLDS}, got {self.manifold!r}")
        if self.method not in _METHODS:
            raise ConfigError(f"method must be one of {_METHODS}, got {self.method!r}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.sigma2 <= 0.0:
            raise ConfigError(f"sigma2 must be > 0, got {self.sigma2}")
        if self.marginal_A is not None and self.marginal_A <= 1.0:
            raise ConfigError("marginal-A must be > 1")
        if self.c <= 0.0:
            raise ConfigError(f"c must be > 0, got {self.c}")
        if self.grid_K is not None and self.rate_epsilon is not None:
            raise ConfigError("grid-K and rate-epsilon are mutually exclusive")
        if self.grid_K is not None and self.grid_K < 1:
            raise ConfigError("grid-K must be >= 1")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def segments(self, n: int) -> int:
        """Knot-interval count: explicit grid size, rate rule, or default."""
        if self.rate_epsilon is not None:
            K, _ = theorem_rate_sidelength(n, self.rate_epsilon)
            return K
        if self.grid_K is not None:
            return self.grid_K
        return DEFAULTS["K"]

    def anneal_config(self) -> AnnealConfig:
        base = AnnealConfig()
        return AnnealConfig(
            initial_temperature=self.anneal_t0 if self.anneal_t0 is not None else base.initial_temperature,
            cooling_factor=self.anneal_cool if self.anneal_cool is not None else base.cooling_factor,
            steps_per_temperature=self.anneal_steps if self.anneal_steps is not None else base.steps_per_temperature,
            temperature_floor=base.temperature_floor,
            proposal_time=base.proposal_time,
        )

    def noise_model(self):
        if self.marginal_A is not None:
            return MarginalVariance(self.marginal_A)
        return KnownVariance(self.sigma2)


def _parse_number_list(value, kind: str):
    """Comma-separated string or JSON list into a list of numbers."""
    if value is None:
        return None
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise ConfigError(f"{kind} must be a comma-separated list, got {value!r}")
    try:
        if kind == "n-values":
            return [int(p) for p in parts]
        return [float(p) for p in parts]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {kind} entry: {exc}") from exc


def _coerce(key: str, value):
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            coerced = int(value)
            if isinstance(value, float) and value != coerced:
                raise ValueError(f"{value!r} is not an integer")
            return coerced
        if key in _FLOAT_KEYS:
            return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from exc
    return value


def merge_options(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags, with type coercion."""
    merged = dict(_DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path is not None:
        try:
            with open(config_path) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        for raw_key, value in loaded.items():
            key = raw_key.replace("-", "_")
            if key not in merged:
                raise ConfigError(f"unknown config key {raw_key!r}")
            merged[key] = _coerce(key, value)
    for key in merged:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = _coerce(key, flag_value)
    return merged


def _run_config(merged: dict) -> RunConfig:
    return RunConfig(
        manifold=merged["manifold"],
        method=merged["method"],
        n=merged["n"],
        sigma2=merged["sigma2"],
        marginal_A=merged["marginal_A"],
        c=merged["c"],
        grid_K=merged["grid_K"],
        rate_epsilon=merged["rate_epsilon"],
        seed=merged["seed"],
        replicates=merged["replicates"],
        out=merged["out"],
        anneal_t0=merged["anneal_t0"],
        anneal_cool=merged["anneal_cool"],
        anneal_steps=merged["anneal_steps"],
        workers=merged["workers"],
    )


# -- subcommands -----------------------------------------------------------


def cmd_generate(cfg: RunConfig) -> int:
    out = cfg.out or "dataset.csv"
    m = make_manifold(cfg.manifold)
    f0 = default_truth(cfg.manifold)
    rng = np.random.default_rng(cfg.seed)
    data = generate_dataset(f0, cfg.n, cfg.sigma2, PredictorDensity.uniform(), m, rng)
    data.save_csv(out)
    print(f"generated {data.n} {cfg.manifold} observations (sigma2={cfg.sigma2}, seed={cfg.seed}) -> {out}")
    return EXIT_OK


def _rows_path(out: str) -> str:
    if out.endswith(".json"):
        return out[: -len(".json")] + ".csv"
    return out + ".csv"


def _append_row(path: str, row: ExperimentResult) -> None:
    try:
        with open(path) as fh:
            has_header = fh.readline().strip() == CSV_HEADER
    except OSError:
        has_header = False
    with open(path, "a", newline="") as fh:
        if not has_header:
            fh.write(CSV_HEADER + "\n")
        fh.write(row.csv_row() + "\n")


def cmd_fit(cfg: RunConfig, dataset_path: str) -> int:
    try:
        data = Dataset.load_csv(dataset_path, cfg.manifold)
    except OSError as exc:
        raise ConfigError(f"cannot read dataset: {exc}") from exc
    m = data.manifold()
    f0 = default_truth(cfg.manifold)
    density = PredictorDensity.uniform()
    sigma = cfg.noise_model()
    out = cfg.out or "fit.json"
    rng = np.random.default_rng(cfg.seed)
    K = cfg.segments(data.n)

    start = time.perf_counter()
    if cfg.method == "dbm":
        fit = anneal_map(data, sigma, PriorSpec.from_segments(K, cfg.c), cfg.anneal_config(), m, rng)
        fitted = fit.path
        payload = fit.to_dict()
    elif cfg.method == "cbm":
        fit = fit_cbm(data, sigma, cfg.c, cfg.anneal_config(), m, rng)
        fitted = fit.path
        K = fitted.knots.shape[0] - 1
        payload = fit.to_dict()
    else:
        fitted = KernelFit.from_rule(data)
        K = 0
        payload = {"method": "ker", "bandwidth": fitted.bandwidth}
        print(f"bandwidth={repr(fitted.bandwidth)}")
    l1 = dq_distance(fitted, f0, 1.0, density, m)
    runtime_ms = int(round((time.perf_counter() - start) * 1000.0))

    payload["method"] = cfg.method
    payload["l1_error"] = l1
    with open(out, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    row = ExperimentResult(
        run_id=f"fit-{cfg.method}-seed{cfg.seed}",
        method=cfg.method,
        n=data.n,
        K=K,
        c=cfg.c,
        sigma2=cfg.sigma2,
        seed=cfg.seed,
        l1_error=l1,
        runtime_ms=runtime_ms,
    )
    _append_row(_rows_path(out), row)
    print(f"fit {cfg.method} on n={data.n}: l1_error={repr(l1)} -> {out}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, axis, values) -> int:
    if axis is None or values is None:
        raise ConfigError("sweep needs --axis and --values")
    values = _parse_number_list(values, "values")
    if axis == "K":
        values = [int(v) for v in values]
    elif axis == "n":
        values = [int(v) for v in values]
    out = cfg.out or "sweep.csv"
    try:
        rows = run_sweep(
            axis,
            values,
            base_seed=cfg.seed,
            replicates=cfg.replicates,
            workers=cfg.workers,
            method=cfg.method,
            manifold=cfg.manifold,
            n=cfg.n,
            K=cfg.grid_K if cfg.grid_K is not None else DEFAULTS["K"],
            c=cfg.c,
            sigma2=cfg.sigma2,
            anneal=cfg.anneal_config(),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_rows(out, rows)
    for value in values:
        key = {"c": "c", "K": "K", "n": "n"}[axis]
        matching = [r.l1_error for r in rows if getattr(r, key) == value]
        print(f"{axis}={value} mean_l1={repr(float(np.mean(matching)))}")
    print(f"wrote {len(rows)} rows -> {out}")
    return EXIT_OK


def cmd_contract(cfg: RunConfig, n_values, c_given: bool) -> int:
    n_values = _parse_number_list(n_values, "n-values")
    if n_values is None:
        raise ConfigError("contract needs --n-values")
    epsilon = cfg.rate_epsilon if cfg.rate_epsilon is not None else 0.05
    # the sweep default c=0.01 over-smooths the sampler; unless set, use 1.0
    c = cfg.c if c_given else 1.0
    out = cfg.out or "contract.csv"
    try:
        report = run_contract(
            n_values,
            epsilon,
            base_seed=cfg.seed,
            replicates=cfg.replicates,
            workers=cfg.workers,
            manifold=cfg.manifold,
            sigma2=cfg.sigma2,
            c=c,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_rows(out, report.rows)
    for line in report.summary_lines():
        print(line)
    print(f"wrote {len(report.rows)} rows -> {out}")
    return EXIT_OK


def cmd_check_kernels(perturbation: float) -> int:
    results = run_checks(perturbation)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON file supplying any option; flags override")
    shared.add_argument("--manifold", choices=_MANIFOLDS)
    shared.add_argument("--method", choices=_METHODS)
    shared.add_argument("--n", type=int)
    shared.add_argument("--sigma2", type=float)
    shared.add_argument("--marginal-A", dest="marginal_A", type=float)
    shared.add_argument("--c", type=float)
    shared.add_argument("--grid-K", dest="grid_K", type=int)
    shared.add_argument("--rate-epsilon", dest="rate_epsilon", type=float)
    shared.add_argument("--seed", type=int)
    shared.add_argument("--replicates", type=int)
    shared.add_argument("--out")
    shared.add_argument("--anneal-t0", dest="anneal_t0", type=float)
    shared.add_argument("--anneal-cool", dest="anneal_cool", type=float)
    shared.add_argument("--anneal-steps", dest="anneal_steps", type=int)
    shared.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="bmreg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("generate", parents=[shared], help="write a synthetic dataset CSV")

    fit = sub.add_parser("fit", parents=[shared], help="fit one estimator to a dataset CSV")
    fit.add_argument("dataset", help="dataset CSV path")

    sweep = sub.add_parser("sweep", parents=[shared], help="run a parameter sweep")
    sweep.add_argument("--axis", choices=("c", "K", "n"))
    sweep.add_argument("--values", help="comma-separated axis values")

    contract = sub.add_parser("contract", parents=[shared], help="posterior contraction-rate study")
    contract.add_argument("--n-values", dest="n_values", help="comma-separated sample sizes")

    check = sub.add_parser("check-kernels", help="run kernel and metric self-checks")
    check.add_argument(
        "--inject-kernel-perturbation",
        dest="perturbation",
        type=float,
        default=0.0,
        help=argparse.SUPPRESS,
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_CONFIG_ERROR
        return EXIT_OK if code == 0 else EXIT_CONFIG_ERROR

    if args.command == "check-kernels":
        return cmd_check_kernels(args.perturbation)

    try:
        merged = merge_options(args)
        cfg = _run_config(merged)
        if args.command == "generate":
            return cmd_generate(cfg)
        if args.command == "fit":
            return cmd_fit(cfg, args.dataset)
        if args.command == "sweep":
            return cmd_sweep(cfg, merged["axis"], merged["values"])
        if args.command == "contract":
            c_given = args.c is not None or merged["c"] != _DEFAULTS["c"]
            return cmd_contract(cfg, merged["n_values"], c_given)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except Exception as exc:  # inference or I/O failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_FAILURE


if __name__ == "__main__":
    sys.exit(main())

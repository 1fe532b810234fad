"""Command-line front end.

Subcommands::

    curve       sample the closed-form functional for one chain
    verify      run the full ED-oracle cross-check battery
    conjecture  scan the conjectured contraction identity over chain sizes
    sweep       batch curves over lists of N and mu/J, in parallel
    hv          hidden-variable identity demos on random instances

Every command writes its data file plus a ``<output>.manifest.json``
recording the resolved configuration; rerunning with the same
configuration reproduces the data files byte for byte.  Exit codes are
stable: 0 success, 1 usage or configuration error, 2 scientific
verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import UsageError, VerificationFailure
from .hidden_variables import DEFAULT_HV_SEED, run_hv_suite
from .inequality import (
    CHCurve,
    I_CH_AT_ZERO,
    SQRT2,
    ViolationReport,
    find_violations,
    sample_curve,
)
from .oracle import DEFAULT_SITE_CAP, HARD_SITE_CAP, contraction_identity_deviation, resolve_convention
from .output import (
    CONJECTURE_COLUMNS,
    CURVE_COLUMNS,
    SWEEP_COLUMNS,
    build_manifest,
    manifest_path,
    write_csv,
    write_json,
    write_json_rows,
)
from .spectral import ChainParams, Convention
from .verification import run_verification

CONJECTURE_TOLERANCE = 1e-9
CONJECTURE_REFERENCE_MAX_N = 5


@dataclass
class RunConfig:
    """Fully resolved configuration for one CLI invocation."""

    subcommand: str
    n_sites: int = 3
    coupling_j: float = 1.0
    mu_over_j: float = -1.0
    t_max: float = 20.0
    t_steps: int = 2000
    convention: str = "auto"
    output: str = ""
    format: str = "csv"
    oracle_max_n: int = DEFAULT_SITE_CAP
    rng_seed: int = DEFAULT_HV_SEED
    parallelism: int = 0
    plot: bool = False
    n_min: int = 2
    n_max: int = 0
    n_sites_list: tuple[int, ...] = (4, 8, 16, 32, 64, 128)
    mu_over_j_list: tuple[float, ...] = (-1.0,)
    instances: int = 100


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# name -> (converter, flag?, help); shared across subcommands that list it.
_OPTIONS = {
    "n_sites": (int, False, "chain length N"),
    "coupling_j": (float, False, "hopping J (sets the energy and time scale)"),
    "mu_over_j": (float, False, "transverse field in units of J"),
    "t_max": (float, False, "largest time on the grid (in 1/J when J=1)"),
    "t_steps": (int, False, "number of grid samples including t=0"),
    "convention": (str, False, "eigenvector sign convention: plain|alternating|auto"),
    "output": (str, False, "data file path"),
    "format": (str, False, "data file format: csv|json"),
    "oracle_max_n": (int, False, f"dense-oracle site cap (hard maximum {HARD_SITE_CAP})"),
    "rng_seed": (int, False, "seed for random instance generation"),
    "parallelism": (int, False, "worker threads (0 = all hardware threads)"),
    "plot": (_bool, True, "also render a PNG figure next to the data file"),
    "n_min": (int, False, "smallest chain length"),
    "n_max": (int, False, "largest chain length"),
    "n_sites_list": (_int_list, False, "comma-separated chain lengths"),
    "mu_over_j_list": (_float_list, False, "comma-separated mu/J values"),
    "instances": (int, False, "number of random instances"),
}

_COMMAND_OPTIONS = {
    "curve": [
        "n_sites", "coupling_j", "mu_over_j", "t_max", "t_steps",
        "convention", "output", "format", "oracle_max_n", "plot",
    ],
    "verify": [
        "n_min", "n_max", "coupling_j", "mu_over_j_list", "t_max", "t_steps",
        "convention", "output", "oracle_max_n",
    ],
    "conjecture": [
        "n_min", "n_max", "coupling_j", "mu_over_j", "t_max", "t_steps",
        "convention", "output", "format", "oracle_max_n",
    ],
    "sweep": [
        "n_sites_list", "mu_over_j_list", "coupling_j", "t_max", "t_steps",
        "convention", "output", "format", "parallelism", "plot", "oracle_max_n",
    ],
    "hv": ["instances", "rng_seed", "output"],
}

_COMMAND_DEFAULTS = {
    "curve": {},
    "verify": {"t_max": 3.0, "t_steps": 31, "n_max": 8,
               "mu_over_j_list": (-1.0, 0.0, 2.0), "output": "verify_report.json"},
    "conjecture": {"t_max": 3.0, "t_steps": 31, "n_max": 10, "output": "conjecture.csv"},
    "sweep": {"output": "sweep.csv"},
    "hv": {"output": "hv_report.json"},
}
_DEFAULT_OUTPUT = {"curve": "curve.csv", "sweep": "sweep.csv", "conjecture": "conjecture.csv",
                   "verify": "verify_report.json", "hv": "hv_report.json"}


class _Parser(argparse.ArgumentParser):
    # The stock parser exits with status 2 on bad flags; our contract
    # reserves 2 for scientific failures, so route through UsageError.
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="bellchain", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"bellchain {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand")
    for command, names in _COMMAND_OPTIONS.items():
        sub = subparsers.add_parser(command, help=f"{command} command")
        sub.add_argument("--config", default=None,
                         help="key=value file mirroring the flags (flags win)")
        for name in names:
            converter, is_flag, help_text = _OPTIONS[name]
            flag = "--" + name.replace("_", "-")
            if is_flag:
                sub.add_argument(flag, dest=name, action="store_true",
                                 default=argparse.SUPPRESS, help=help_text)
            else:
                sub.add_argument(flag, dest=name, type=converter,
                                 default=argparse.SUPPRESS, help=help_text)
    return parser


def read_config_file(path: str, command: str) -> dict:
    """Parse ``key = value`` lines and coerce to the option types."""
    values = {}
    allowed = set(_COMMAND_OPTIONS[command])
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in allowed:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r} for {command}")
        converter = _OPTIONS[key][0]
        try:
            values[key] = converter(value.strip())
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    command = args.subcommand
    explicit = {k: v for k, v in vars(args).items() if k not in ("subcommand", "config")}
    from_file = read_config_file(args.config, command) if args.config else {}
    merged = {**_COMMAND_DEFAULTS[command], **from_file, **explicit}
    merged.setdefault("output", _DEFAULT_OUTPUT[command])
    config = RunConfig(subcommand=command, **merged)
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    if config.t_steps < 1:
        raise UsageError(f"t_steps must be >= 1, got {config.t_steps}")
    if config.t_max < 0:
        raise UsageError(f"t_max must be >= 0, got {config.t_max}")
    if config.format not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {config.format!r}")
    if config.convention not in ("plain", "alternating", "auto"):
        raise UsageError(f"unknown convention {config.convention!r}")
    if config.subcommand == "curve" and config.n_sites < 2:
        raise UsageError(f"n_sites must be >= 2, got {config.n_sites}")
    if config.oracle_max_n > HARD_SITE_CAP:
        raise UsageError(
            f"oracle_max_n {config.oracle_max_n} exceeds the hard maximum {HARD_SITE_CAP}"
        )
    if config.subcommand in ("verify", "conjecture"):
        n_max = config.n_max
        if config.n_min < 2:
            raise UsageError("n_min must be >= 2")
        if n_max < config.n_min:
            raise UsageError(f"n_max {n_max} is below n_min {config.n_min}")
        if n_max > config.oracle_max_n:
            raise UsageError(
                f"n_max {n_max} exceeds the oracle cap {config.oracle_max_n}"
            )
    if config.subcommand == "sweep":
        if not config.n_sites_list or not config.mu_over_j_list:
            raise UsageError("sweep needs nonempty n_sites_list and mu_over_j_list")
        if any(n < 2 for n in config.n_sites_list):
            raise UsageError("all swept chain lengths must be >= 2")
    if config.subcommand == "hv" and config.instances < 1:
        raise UsageError("instances must be >= 1")


def _chain_params(config: RunConfig, n_sites: int, mu_over_j: float) -> ChainParams:
    return ChainParams(n_sites, config.coupling_j, mu_over_j * config.coupling_j)


def _choose_convention(config: RunConfig) -> Convention:
    if config.convention == "auto":
        return resolve_convention(site_cap=config.oracle_max_n)
    return Convention(config.convention)


def _time_grid(config: RunConfig) -> np.ndarray:
    # t_max is a tJ value; convert to raw time so outputs carry both.
    return np.linspace(0.0, config.t_max / abs(config.coupling_j), config.t_steps) \
        if config.coupling_j != 0 else np.linspace(0.0, config.t_max, config.t_steps)


def _curve_rows(curve: CHCurve) -> list[dict]:
    j = curve.params.coupling_j
    n = curve.params.n_sites
    rows = []
    for i in range(len(curve)):
        t = float(curve.t[i])
        rows.append(
            {
                "t": t,
                "tJ": t * j,
                "tJ_over_N": t * j / n,
                "i_ch": float(curve.i_ch[i]),
                "gnn_abs2": float(curve.gnn_abs2[i]),
                "g1n_abs2": float(curve.g1n_abs2[i]),
                "re_gnn": float(curve.re_gnn[i]),
                "violation_flag": bool(curve.i_ch[i] > 1.0),
            }
        )
    return rows


def _curve_checks(curve: CHCurve) -> dict:
    recombined = 0.5 + SQRT2 / 4.0 * (curve.gnn_abs2 + curve.g1n_abs2 + curve.re_gnn)
    recombination = float(np.max(np.abs(recombined - curve.i_ch))) if len(curve) else 0.0
    low, high = float(np.min(curve.i_ch)), float(np.max(curve.i_ch))
    in_range = (low >= 0.5 - SQRT2 / 4.0 - 1e-12) and (high <= I_CH_AT_ZERO + 1e-12)
    return {
        "recombination": {"max_deviation": recombination, "tolerance": 1e-12,
                          "passed": recombination <= 1e-12},
        "range": {"min": low, "max": high, "passed": in_range},
    }


def _report_dict(report: ViolationReport) -> dict:
    return dataclasses.asdict(report)


def _write_rows(config: RunConfig, schema: str, columns, rows, manifest: dict) -> None:
    out = Path(config.output)
    if config.format == "csv":
        write_csv(out, schema, columns, rows)
    else:
        write_json_rows(out, schema, rows, manifest)
    write_json(manifest_path(out), manifest)


def cmd_curve(config: RunConfig) -> int:
    started = time.perf_counter()
    params = _chain_params(config, config.n_sites, config.mu_over_j)
    convention = _choose_convention(config)
    curve = sample_curve(params, convention, _time_grid(config))
    report = find_violations(curve)
    rows = _curve_rows(curve)
    checks = _curve_checks(curve)

    manifest = build_manifest(
        "curve",
        dataclasses.asdict(config),
        __version__,
        convention.value,
        time.perf_counter() - started,
        checks,
        [config.output],
        extra={"violation_report": _report_dict(report)},
    )
    _write_rows(config, "curve/v1", CURVE_COLUMNS, rows, manifest)
    outputs = [config.output, str(manifest_path(Path(config.output)))]
    if config.plot:
        from .plotting import render_curve_figure

        figure = Path(config.output).with_suffix(".png")
        render_curve_figure(curve, report, figure)
        outputs.append(str(figure))

    intervals = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in report.violation_intervals) or "none"
    print(f"curve: N={params.n_sites} mu/J={config.mu_over_j:g} rows={len(rows)}")
    print(f"violation intervals (t): {intervals}")
    if report.t_star_numeric is not None:
        print(f"t* numeric = {report.t_star_numeric:.9g}, estimate = {report.t_star_estimate:.9g}")
    print("wrote: " + ", ".join(outputs))
    return 0


def cmd_verify(config: RunConfig) -> int:
    started = time.perf_counter()
    tj_grid = np.linspace(0.0, config.t_max, config.t_steps)
    outcome = run_verification(
        n_values=range(config.n_min, config.n_max + 1),
        mu_over_j_values=config.mu_over_j_list,
        coupling_j=config.coupling_j,
        tj_grid=tj_grid,
        convention=config.convention,
        site_cap=config.oracle_max_n,
    )
    checks = {c.name: c.as_dict() for c in outcome.checks}
    manifest = build_manifest(
        "verify",
        dataclasses.asdict(config),
        __version__,
        outcome.convention.value,
        time.perf_counter() - started,
        checks,
        [config.output],
    )
    report = {
        "schema": "bellchain.verify/v1",
        "convention": outcome.convention.value,
        "passed": outcome.passed,
        "checks": [c.as_dict() for c in outcome.checks],
        "cells": outcome.cells,
    }
    write_json(Path(config.output), report)
    write_json(manifest_path(Path(config.output)), manifest)

    for check in outcome.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: max deviation {check.max_deviation:.3e}"
              f" (tolerance {check.tolerance:.1e})")
    print(f"convention: {outcome.convention.value}")
    if not outcome.passed:
        print("verification FAILED: " + ", ".join(outcome.failing()), file=sys.stderr)
        return 2
    print(f"verification passed; report in {config.output}")
    return 0


def cmd_conjecture(config: RunConfig) -> int:
    started = time.perf_counter()
    convention = _choose_convention(config)
    t_grid = _time_grid(config)
    if t_grid.size == 0:
        raise UsageError("empty time grid")
    rows = []
    for n in range(config.n_min, config.n_max + 1):
        params = _chain_params(config, n, config.mu_over_j)
        deviation = contraction_identity_deviation(
            params, t_grid, convention, site_cap=config.oracle_max_n
        )
        rows.append(
            {
                "n_sites": n,
                "max_abs_deviation": deviation,
                "within_tolerance": deviation <= CONJECTURE_TOLERANCE,
            }
        )

    failing = [r for r in rows if not r["within_tolerance"]]
    checks = {
        "contraction_identity": {
            "max_deviation": max(r["max_abs_deviation"] for r in rows),
            "tolerance": CONJECTURE_TOLERANCE,
            "passed": not failing,
        }
    }
    manifest = build_manifest(
        "conjecture",
        dataclasses.asdict(config),
        __version__,
        convention.value,
        time.perf_counter() - started,
        checks,
        [config.output],
    )
    _write_rows(config, "conjecture/v1", CONJECTURE_COLUMNS, rows, manifest)

    for row in rows:
        status = "PASS" if row["within_tolerance"] else "FAIL"
        print(f"{status} N={row['n_sites']}: max |lhs - rhs| = {row['max_abs_deviation']:.3e}")
    if failing:
        small = [r["n_sites"] for r in failing if r["n_sites"] <= CONJECTURE_REFERENCE_MAX_N]
        if small:
            print(f"identity broken in the exact reference range (N <= "
                  f"{CONJECTURE_REFERENCE_MAX_N}): implementation regression", file=sys.stderr)
        else:
            print("identity deviation at extended sizes: new evidence against the "
                  "conjectured relation; full data retained in the output", file=sys.stderr)
        return 2
    return 0


def _sweep_cell(config: RunConfig, n: int, mu_over_j: float, convention: Convention,
                t_grid: np.ndarray) -> dict:
    params = _chain_params(config, n, mu_over_j)
    curve = sample_curve(params, convention, t_grid)
    report = find_violations(curve, include_peaks=False)
    return {
        "n_sites": n,
        "mu_over_j": mu_over_j,
        "curve": curve,
        "rows": [
            {"n_sites": n, "mu_over_j": mu_over_j, **row} for row in _curve_rows(curve)
        ],
        "report": report,
    }


def cmd_sweep(config: RunConfig) -> int:
    started = time.perf_counter()
    convention = _choose_convention(config)
    t_grid = _time_grid(config)
    cells = sorted(
        {(n, mu) for n in config.n_sites_list for mu in config.mu_over_j_list}
    )
    workers = config.parallelism or os.cpu_count() or 1

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            key: pool.submit(_sweep_cell, config, key[0], key[1], convention, t_grid)
            for key in cells
        }
        results = {key: futures[key].result() for key in cells}

    rows = []
    cell_summaries = []
    all_checks = []
    for key in cells:  # deterministic assembly order, independent of scheduling
        cell = results[key]
        rows.extend(cell["rows"])
        all_checks.append(_curve_checks(cell["curve"]))
        cell_summaries.append(
            {
                "n_sites": cell["n_sites"],
                "mu_over_j": cell["mu_over_j"],
                "violation_report": _report_dict(cell["report"]),
            }
        )

    checks = {
        "recombination": {
            "max_deviation": max(c["recombination"]["max_deviation"] for c in all_checks),
            "tolerance": 1e-12,
            "passed": all(c["recombination"]["passed"] for c in all_checks),
        },
        "range": {"passed": all(c["range"]["passed"] for c in all_checks)},
    }
    manifest = build_manifest(
        "sweep",
        dataclasses.asdict(config),
        __version__,
        convention.value,
        time.perf_counter() - started,
        checks,
        [config.output],
        extra={"cells": cell_summaries},
    )
    _write_rows(config, "sweep/v1", SWEEP_COLUMNS, rows, manifest)
    outputs = [config.output, str(manifest_path(Path(config.output)))]
    if config.plot:
        from .plotting import render_sweep_figure

        figure = Path(config.output).with_suffix(".png")
        render_sweep_figure(
            [
                {
                    "n_sites": results[key]["n_sites"],
                    "mu_over_j": results[key]["mu_over_j"],
                    "tj": results[key]["curve"].t * config.coupling_j,
                    "i_ch": results[key]["curve"].i_ch,
                }
                for key in cells
            ],
            figure,
        )
        outputs.append(str(figure))

    print(f"sweep: {len(cells)} cells x {config.t_steps} samples = {len(rows)} rows")
    print("wrote: " + ", ".join(outputs))
    return 0


def cmd_hv(config: RunConfig) -> int:
    started = time.perf_counter()
    result = run_hv_suite(rng_seed=config.rng_seed, instances=config.instances)
    checks = {
        "repeated_identity": {
            "max_deviation": result.max_dev_repeated,
            "tolerance": result.tolerance,
            "passed": result.max_dev_repeated <= result.tolerance,
        },
        "causal_identity": {
            "max_deviation": result.max_dev_causal,
            "tolerance": result.tolerance,
            "passed": result.max_dev_causal <= result.tolerance,
        },
        "worked_example": {
            "probabilities": result.worked_example,
            "passed": all(abs(v - 0.25) <= 1e-12 for v in result.worked_example.values()),
        },
    }
    manifest = build_manifest(
        "hv",
        dataclasses.asdict(config),
        __version__,
        None,
        time.perf_counter() - started,
        checks,
        [config.output],
    )
    report = {
        "schema": "bellchain.hv/v1",
        "rng_seed": result.rng_seed,
        "instances": result.instances,
        "max_dev_repeated": result.max_dev_repeated,
        "max_dev_causal": result.max_dev_causal,
        "worked_example": result.worked_example,
        "passed": result.passed,
    }
    write_json(Path(config.output), report)
    write_json(manifest_path(Path(config.output)), manifest)

    print(f"hv: {result.instances} seeded instances (seed {result.rng_seed})")
    print(f"repeated-measurement identity: max |direct - hidden| = {result.max_dev_repeated:.3e}")
    print(f"causal-handoff identity:       max |direct - hidden| = {result.max_dev_causal:.3e}")
    print(f"worked example probabilities: {result.worked_example}")
    if not result.passed:
        print("hidden-variable identities FAILED tolerance", file=sys.stderr)
        return 2
    return 0


_DISPATCH = {
    "curve": cmd_curve,
    "verify": cmd_verify,
    "conjecture": cmd_conjecture,
    "sweep": cmd_sweep,
    "hv": cmd_hv,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.subcommand:
            parser.print_help()
            return 1
        config = build_config(args)
        return _DISPATCH[config.subcommand](config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

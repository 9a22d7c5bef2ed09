"""Command-line driver: scenario orchestration and machine-readable output.

One executable with `--config run.toml`; the command (simulate, linear-decay,
green-audit, lower-bound, rates, sweep, box-sensitivity) lives in the config.
Outputs per run directory: the time-series or channel table as CSV (header
first line, stable float formatting, byte-identical under a fixed seed) and
a JSON summary/report embedding the resolved configuration and a format
version.  Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 audit
FAIL.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import audits, diagnostics
from .config import ConfigError, RunConfig, load_config
from .diagnostics import SERIES_COLUMNS, DecaySeries, fit_decay
from .green import classify_regime, green_matrix_batch
from .model import PositivityError
from .params import PhysParams
from .rates import rate_table
from .scenarios import make_initial
from .spectral import make_grid
from .stepper import NumericsError, run
from .fitting import fit_power

__all__ = ["main", "execute", "write_series_csv", "read_table", "FORMAT_VERSION"]

FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_AUDIT = 4


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_table(path: Path, columns, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_series_csv(path: Path, series: DecaySeries):
    rows = [[rec[k] for k in SERIES_COLUMNS] for rec in series.records]
    write_table(path, SERIES_COLUMNS, rows)


def read_table(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.strip().split(",")]
                for line in fh if line.strip()]
    data = np.asarray(rows, dtype=float)
    return header, data


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def write_json(path: Path, payload: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _summary_base(cfg: RunConfig) -> dict:
    return {"format_version": FORMAT_VERSION, "command": cfg.command,
            "config": cfg.raw}


def _fit_window(cfg: RunConfig, series: DecaySeries):
    t = series.times
    t_min = cfg.fit.get("t_min")
    t_max = cfg.fit.get("t_max")
    if t_min is None:
        t_min = cfg.t_end / 10.0 if cfg.t_end > 0 else float(t.min())
    if t_max is None:
        t_max = float(t.max())
    return float(t_min), float(t_max)


def _cmd_simulate(cfg: RunConfig, out: Path, quiet: bool) -> int:
    grid = make_grid(cfg.params.dim, cfg.grid_points, cfg.box_length)
    initial = make_initial(grid, cfg.params, cfg.scenario, seed=cfg.seed)
    series = run(initial, cfg.stepper, cfg.params, cfg.t_end,
                 sobolev_s=cfg.fit.get("sobolev_s"),
                 metadata={"scenario": cfg.scenario.name, "seed": cfg.seed})
    write_series_csv(out / "series.csv", series)

    window = _fit_window(cfg, series)
    fits = []
    for quantity in cfg.fit["quantities"]:
        try:
            fits.append(fit_decay(series, quantity, window))
        except ValueError as exc:
            fits.append({"quantity": quantity, "error": str(exc)})
    tab = rate_table(cfg.params.dim, cfg.params.alpha)
    summary = _summary_base(cfg)
    summary.update({
        "series": "series.csv",
        "metadata": series.metadata,
        "fit_window": window,
        "fits": fits,
        "rate_table": tab,
        "mass_drift": float(abs(series.values("mass")[-1] - series.values("mass")[0])),
    })
    write_json(out / "summary.json", summary)
    if not quiet:
        for f in fits:
            if hasattr(f, "exponent"):
                ref = "" if f.reference is None else f" (reference {f.reference:+.4f})"
                print(f"fit {f.quantity}: exponent {f.exponent:+.4f}{ref}")
    return EXIT_OK


def _cmd_linear_decay(cfg: RunConfig, out: Path, quiet: bool) -> int:
    lin = cfg.sections["linear"]
    dim = lin.get("dimension") or cfg.params.dim
    ts = np.geomspace(lin["t_min"], lin["t_max"], lin["t_points"])
    fhat = audits.gaussian_spectrum(width=lin["data_width"])
    series = audits.green_channel_series(fhat, lin["s"], ts, cfg.params, dim)

    heat = np.empty_like(ts)
    area = audits.sphere_area(dim)
    for i, t in enumerate(ts):
        heat[i] = np.sqrt(audits.radial_integral(
            lambda r: area * r ** (dim - 1 + 2.0 * lin["s"])
            * (np.exp(-cfg.params.mu * t * r**cfg.params.alpha) * fhat(r)) ** 2,
            [max(t, 1.0) ** (-1.0 / cfg.params.alpha), 1.0], 60.0))

    columns = ["t", "L2_G11", "L2_G21", "L2_G22", "L1_G11", "L1_G21", "L1_G22", "L2_heat"]
    rows = [[t, series["G11"]["L2"][i], series["G21"]["L2"][i], series["G22"]["L2"][i],
             series["G11"]["L1"][i], series["G21"]["L1"][i], series["G22"]["L1"][i],
             heat[i]] for i, t in enumerate(ts)]
    write_table(out / "linear_decay.csv", columns, rows)

    alpha, s = cfg.params.alpha, lin["s"]
    window = (float(ts.min()), float(ts.max()))
    refs = {
        "L2_G11": -(dim + 2.0 * s) / (2.0 * (2.0 - alpha)),
        "L2_G21": -(dim + 2.0 * s + 2.0 - 2.0 * alpha) / (2.0 * (2.0 - alpha)),
        "L2_heat": -(dim + 2.0 * s) / (2.0 * alpha),
    }
    values = {"L2_G11": series["G11"]["L2"], "L2_G21": series["G21"]["L2"],
              "L2_heat": heat}
    tol = cfg.fit["tolerance"]
    fits = {}
    passed = True
    for name, ref in refs.items():
        fit = fit_power(ts, values[name], window, name, ref)
        fits[name] = fit
        passed = passed and fit.rel_deviation <= tol
        if not quiet:
            print(f"{name}: exponent {fit.exponent:+.4f} vs {ref:+.4f} "
                  f"({'PASS' if fit.rel_deviation <= tol else 'FAIL'})")
    summary = _summary_base(cfg)
    summary.update({"table": "linear_decay.csv", "dimension": dim, "fits": fits,
                    "tolerance": tol, "passed": passed})
    write_json(out / "summary.json", summary)
    return EXIT_OK if passed else EXIT_AUDIT


def _cmd_green_audit(cfg: RunConfig, out: Path, quiet: bool) -> int:
    au = cfg.sections["audit"]
    ts = np.geomspace(au["t_min"], au["t_max"], au["t_points"])
    xs = np.geomspace(au["xi_min"], au["xi_max"], au["xi_points"])
    report = audits.pointwise_bound_audit(cfg.params, ts, xs)

    tt, xx = np.meshgrid(ts, xs, indexing="ij")
    g11, g12, g21, g22 = green_matrix_batch(tt, xx, cfg.params)
    regime = classify_regime(xs, cfg.params)
    rows = []
    for i in range(ts.size):
        for j in range(xs.size):
            rows.append([ts[i], xs[j], abs(g11[i, j]), abs(g12[i, j]),
                         abs(g21[i, j]), abs(g22[i, j]),
                         {"LowFrequency": 0, "HighFrequency": 1, "Critical": 2}[
                             np.atleast_1d(regime)[j].value]])
    write_table(out / "samples.csv",
                ["t", "xi", "abs_G11", "abs_G12", "abs_G21", "abs_G22", "regime"], rows)

    payload = _summary_base(cfg)
    payload.update({"samples": "samples.csv", "report": report, "passed": report.passed})
    write_json(out / "report.json", payload)
    if not quiet:
        print(f"green-audit: identity residual {report.identity_max_rel:.2e}, "
              f"{'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_AUDIT


def _cmd_lower_bound(cfg: RunConfig, out: Path, quiet: bool) -> int:
    lin = cfg.sections["linear"]
    dim = lin.get("dimension") or cfg.params.dim
    ts = np.geomspace(max(lin["t_min"], 1.0), lin["t_max"], lin["t_points"])
    if cfg.scenario.name == "zero-mean":
        fhat = lambda r: np.asarray(r) ** 2 * np.exp(-0.5 * (lin["data_width"] * np.asarray(r)) ** 2)
    else:
        fhat = audits.gaussian_spectrum(width=lin["data_width"])
    report = audits.lower_bound_audit(fhat, ts, cfg.params, dim)
    if report.precondition_ok:
        rows = list(zip(report.ts, report.scaled_g11, report.scaled_g21))
        write_table(out / "scaled.csv", ["t", "scaled_G11", "scaled_G21"], rows)
    payload = _summary_base(cfg)
    payload.update({"report": report, "passed": report.passed})
    write_json(out / "report.json", payload)
    if not quiet:
        print(f"lower-bound: {'PASS' if report.passed else 'FAIL'}"
              + ("" if report.precondition_ok else f" ({report.reason})"))
    return EXIT_OK if report.passed else EXIT_AUDIT


def _cmd_rates(cfg: RunConfig, out: Path, quiet: bool) -> int:
    rc = cfg.sections["rates"]
    alphas = np.linspace(rc["alpha_min"], rc["alpha_max"], rc["alpha_points"])
    rows = []
    for dim in rc["dims"]:
        for alpha in alphas:
            tab = rate_table(int(dim), float(alpha))
            rows.append([dim, alpha, float(tab.r1), float(tab.r2),
                         float(tab.incompressible) if tab.incompressible else np.nan,
                         int(tab.pu_valid),
                         float(tab.linf) if tab.linf is not None else np.nan,
                         float(tab.grad_rho) if tab.grad_rho is not None else np.nan])
    write_table(out / "rates.csv",
                ["dim", "alpha", "r1", "r2", "incompressible", "pu_valid",
                 "linf", "grad_rho"], rows)
    summary = _summary_base(cfg)
    summary.update({"table": "rates.csv", "dims": rc["dims"],
                    "alpha_grid": [float(a) for a in alphas]})
    write_json(out / "summary.json", summary)
    if not quiet:
        print(f"rates: {len(rows)} rows over dims {rc['dims']}")
    return EXIT_OK


def _cmd_box_sensitivity(cfg: RunConfig, out: Path, quiet: bool) -> int:
    lengths = cfg.sections["boxes"]["lengths"]
    report = diagnostics.box_sensitivity(
        cfg.scenario, cfg.params, lengths, cfg.stepper, cfg.t_end,
        cfg.grid_points, seed=cfg.seed)
    for L, series in zip(report["box_lengths"], report.pop("series")):
        write_series_csv(out / f"series_L{L:g}.csv", series)
    payload = _summary_base(cfg)
    payload.update({"report": report})
    write_json(out / "report.json", payload)
    if not quiet:
        print(f"box-sensitivity: trustworthy window up to t = {report['trustworthy_t']}")
    return EXIT_OK


def _set_by_path(raw: dict, dotted: str, value):
    keys = dotted.split(".")
    node = raw
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


def _run_sweep(cfg: RunConfig, out: Path, quiet: bool) -> int:
    from .config import parse_config

    sw = cfg.sections["sweep"]
    jobs = []
    for value in sw["values"]:
        raw = json.loads(json.dumps(cfg.raw))  # deep copy
        raw["command"] = sw["command"]
        raw.pop("sweep", None)
        _set_by_path(raw, sw["key"], value)
        sub = parse_config(_to_toml(raw))
        subdir = out / f"run_{sw['key'].replace('.', '_')}_{value}"
        subdir.mkdir(parents=True, exist_ok=True)
        jobs.append((sub, subdir))

    def one(job):
        sub, subdir = job
        return execute(sub, subdir, quiet=True)

    if sw["workers"] > 1:
        import concurrent.futures as futures

        with futures.ThreadPoolExecutor(max_workers=sw["workers"]) as pool:
            codes = list(pool.map(one, jobs))
    else:
        codes = [one(job) for job in jobs]
    payload = _summary_base(cfg)
    payload.update({"runs": [{"value": v, "dir": str(d.name), "exit": c}
                             for (s, d), v, c in zip(jobs, sw["values"], codes)]})
    write_json(out / "sweep.json", payload)
    if not quiet:
        print(f"sweep: {len(jobs)} runs, exit codes {codes}")
    return max(codes) if codes else EXIT_OK


def _to_toml(raw: dict) -> str:
    """Serialize the (flat, two-level) raw config back to TOML."""

    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return json.dumps(v)
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        return repr(v)

    lines = [f"command = {fmt(raw['command'])}"]
    for section, body in raw.items():
        if section == "command":
            continue
        lines.append(f"[{section}]")
        for k, v in body.items():
            lines.append(f"{k} = {fmt(v)}")
    return "\n".join(lines) + "\n"


_DISPATCH = {
    "simulate": _cmd_simulate,
    "linear-decay": _cmd_linear_decay,
    "green-audit": _cmd_green_audit,
    "lower-bound": _cmd_lower_bound,
    "rates": _cmd_rates,
    "box-sensitivity": _cmd_box_sensitivity,
    "sweep": _run_sweep,
}


def execute(cfg: RunConfig, out_dir, quiet: bool = False) -> int:
    """Run one validated configuration; writes artifacts into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "resolved_config.json",
               {"format_version": FORMAT_VERSION, "config": cfg.raw,
                "command": cfg.command, "seed": cfg.seed})
    try:
        return _DISPATCH[cfg.command](cfg, out, quiet)
    except (NumericsError, PositivityError, audits.QuadratureError) as exc:
        write_json(out / "error.json",
                   {"format_version": FORMAT_VERSION, "error": str(exc),
                    "kind": type(exc).__name__, "partial": True})
        if not quiet:
            print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="euleralign",
        description="Alignment-hydrodynamics simulator and decay-rate analysis")
    parser.add_argument("--config", required=True, help="TOML run configuration")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, default=None, help="override scenario seed")
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.seed is not None:
        cfg.seed = args.seed
        cfg.raw.setdefault("scenario", {})["seed"] = args.seed
    out_dir = args.out if args.out is not None else cfg.output_dir
    return execute(cfg, out_dir, quiet=args.quiet)


if __name__ == "__main__":
    sys.exit(main())

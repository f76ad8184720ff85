"""Command-line interface.

Subcommands::

    frontier-evt estimate      --input data.csv [--x ...] [--estimators ...] [--rho ...] [--k ...]
    frontier-evt select-k      --input data.csv [--x ...] [--estimators ...]
    frontier-evt pickands-plot --input data.csv [--x ...]
    frontier-evt simulate      --scenario triangle --n 5000 --reps 100 --x 0.25,0.5,1
    frontier-evt gen           --scenario triangle --n 1000 --seed 1 --out sample.csv

Exit status: 0 on success, 1 on a global input error (unreadable or
malformed CSV, nothing estimable), 2 on inconsistent flags. Failures at
individual query points are reported in-band in the ``status`` and
``reason`` columns.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Optional, Sequence

from . import mc
from .core import Dataset, input_quantile_grid, transform
from .csvio import default_header, load_csv, write_dataset
from .errors import ConfigError, CsvParseError, DimensionMismatch, FrontierError, InvalidParameter
from .simgen import Scenario, scenario_kind
from .tail_index import pickands_plot

EXIT_OK, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2


class InputError(Exception):
    pass


def _num(v) -> str:
    if v is None:
        return ""
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def _k(v) -> str:
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else str(int(v))


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------- inputs

def _load(args) -> tuple[Dataset, list[str]]:
    if args.input:
        if args.scenario:
            raise ConfigError("--input and --scenario are mutually exclusive")
        try:
            return load_csv(args.input)
        except OSError as err:
            raise InputError(f"cannot read {args.input}: {err.strerror or err}") from None
    if args.scenario:
        sc = Scenario(scenario_kind(args.scenario), args.n or 1000, args.seed)
        ds = sc.generate()
        return ds, default_header(ds.input_dim)
    raise ConfigError("give --input <csv> or --scenario <name>")


def parse_points(text: str, p: int) -> list[tuple[float, ...]]:
    """``0.25,0.5,1`` for one input; ``1,2;3,4`` (points split by ';') otherwise."""
    try:
        if p == 1 and ";" not in text:
            pts = [(float(t),) for t in text.split(",") if t.strip()]
        else:
            pts = [tuple(float(c) for c in chunk.split(",")) for chunk in text.split(";") if chunk.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse query points {text!r}") from None
    if not pts:
        raise ConfigError("empty list of query points")
    for q in pts:
        if len(q) != p:
            raise ConfigError(f"query point {q} has {len(q)} components, data has p={p}")
    return pts


def _grid(args, ds: Dataset) -> list[tuple[float, ...]]:
    if args.x:
        return parse_points(args.x, ds.input_dim)
    try:
        return input_quantile_grid(ds)
    except DimensionMismatch as err:
        raise ConfigError(f"{err} (use --x)") from None


def _rho_policy(text: str) -> tuple[str, Optional[float]]:
    t = text.strip().lower()
    if t in ("pickands", "moment"):
        return t, None
    if t.startswith("known:"):
        try:
            v = float(t[6:])
        except ValueError:
            v = math.nan
        if not v > 0:
            raise ConfigError(f"known rho must be > 0 in {text!r}")
        return "known", v
    raise ConfigError(f"--rho must be known:<value>, pickands or moment, got {text!r}")


def resolve_estimators(args) -> list[mc.EstimatorSpec]:
    """Expand bare ``knownrho``/``knownell`` with the ``--rho``/``--ell`` flags."""
    default_k = mc.KPolicy.parse(args.k)
    policy, rho = _rho_policy(args.rho)
    if args.ell is not None and policy != "known":
        raise ConfigError("--ell requires --rho known:<value>")
    out = []
    for item in (t.strip() for t in args.estimators.split(",")):
        if not item:
            continue
        body, at, kpart = item.partition("@")
        name = body.lower()
        if name == "robust":
            body = "orderstat"
        elif name == "knownrho":
            body = f"knownrho:{rho!r}" if policy == "known" else f"twostep:{policy}"
        elif name == "knownell":
            if policy != "known" or args.ell is None:
                raise ConfigError("knownell needs --rho known:<value> and --ell <value>")
            body = f"knownell:{rho!r}:{args.ell!r}"
        elif name in ("rho", "tail"):
            body = "moment_rho" if policy == "moment" else "pickands_rho"
        out.append(mc.EstimatorSpec.parse(body + (at + kpart if at else ""), default_k))
    if not out:
        raise ConfigError("empty estimator list")
    return out


# ---------------------------------------------------------------- commands

def cmd_estimate(args) -> int:
    ds, header = _load(args)
    specs = resolve_estimators(args)
    points = _grid(args, ds)
    xcols = header[:-1]

    res = io.StringIO()
    w = csv.writer(res, lineterminator="\n")
    w.writerow(xcols + ["estimator", "k", "value", "ci_lo", "ci_hi", "level", "status", "reason"])
    plot = io.StringIO()
    pw = csv.writer(plot, lineterminator="\n")
    pw.writerow(xcols + ["curve_id", "y", "band_lo", "band_hi"])

    n_ok = 0
    for q in points:
        ts = transform(ds, q)
        xs = [_num(v) for v in q]
        for spec in specs:
            o = mc.evaluate(spec, ts, args.level)
            status = "ok" if o.ok else "failed"
            n_ok += o.ok
            level = _num(args.level) if o.has_ci else ""
            w.writerow(xs + [spec.label, _k(o.k), _num(o.value), _num(o.lo), _num(o.hi), level, status, o.reason])
            if o.ok:
                pw.writerow(xs + [spec.label, _num(o.value), _num(o.lo), _num(o.hi)])

    _write(res.getvalue(), args.out)
    if args.plot_out:
        _write(plot.getvalue(), args.plot_out)
    if n_ok == 0:
        print("error: no estimate succeeded at any query point", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_select_k(args) -> int:
    ds, header = _load(args)
    specs = resolve_estimators(args)
    points = _grid(args, ds)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header[:-1] + ["estimator", "target", "grid_pos", "k", "estimate", "window_sd", "chosen", "status", "reason"])
    for q in points:
        ts = transform(ds, q)
        xs = [_num(v) for v in q]
        for spec in specs:
            try:
                sel = mc.select(spec, ts, args.level)
            except FrontierError as err:
                w.writerow(xs + [spec.label, "", "", "", "", "", "", "failed", f"{type(err).__name__}: {err}"])
                continue
            for i, (k, est) in enumerate(sel.grid):
                sd = sel.rolling_sd[i] if i < sel.rolling_sd.shape[0] else math.nan
                w.writerow(xs + [
                    spec.label, sel.target, str(i + 1), str(k), _num(est), _num(sd),
                    "1" if i == sel.chosen_index else "0", "ok" if math.isfinite(est) else "failed", "",
                ])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_pickands_plot(args) -> int:
    ds, header = _load(args)
    points = _grid(args, ds)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header[:-1] + ["k", "rho", "status", "reason"])
    for q in points:
        ts = transform(ds, q)
        xs = [_num(v) for v in q]
        try:
            entries = pickands_plot(ts)
        except FrontierError as err:
            w.writerow(xs + ["", "", "failed", f"{type(err).__name__}: {err}"])
            continue
        for k, est in entries:
            w.writerow(xs + [str(k), _num(est.value), "ok" if est.ok else "failed", est.failure or ""])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.input:
        raise ConfigError("simulate draws from --scenario; --input is not used")
    sc = Scenario(scenario_kind(args.scenario or "triangle"), args.n or 5000, args.seed)
    specs = resolve_estimators(args)
    xs = [q[0] for q in parse_points(args.x or "0.25,0.5,1", 1)]
    cfg = mc.ExperimentConfig(sc, args.reps, tuple(xs), tuple(specs), args.level)
    rep = mc.run_experiment(cfg, workers=args.workers)
    _write(mc.emit_report_table(rep, args.format), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    sc = Scenario(scenario_kind(args.scenario or "triangle"), args.n or 1000, args.seed)
    buf = io.StringIO()
    write_dataset(sc.generate(), buf)
    _write(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser, *, estimators: str, rho: str = "moment", x_help: str = None) -> None:
    p.add_argument("--input", help="input CSV (header x1,...,xp,y)")
    p.add_argument("--scenario", help="simulate the data instead: triangle or cobb-douglas")
    p.add_argument("--n", type=int, help="sample size for --scenario")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--x", help=x_help or "query points: '0.2,0.5' (p=1) or '1,2;3,4' (p>1); "
                   "default: observed input quantiles at levels 0.05..0.95 (p=1 only)")
    p.add_argument("--estimators", default=estimators, help=f"comma-separated estimators (default {estimators})")
    p.add_argument("--rho", default=rho, help="tail index policy: known:<value>, pickands or moment "
                   f"(default {rho}); bare 'knownrho' uses it")
    p.add_argument("--ell", type=float, help="known ell for the knownell interval (needs --rho known:<v>)")
    p.add_argument("--k", default="auto", help="threshold policy: <int>, grid:<j> or auto (default)")
    p.add_argument("--level", type=float, default=0.95, help="confidence level (default 0.95)")
    p.add_argument("--out", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="frontier-evt",
        description="Extreme-value estimation of monotone production frontiers.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the frontier on a grid of query points")
    _common(p, estimators="fdh,robust,knownrho")
    p.add_argument("--plot-out", help="write plot-ready curve data (x, curve_id, y, band_lo, band_hi)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("select-k", help="threshold selection diagnostics")
    _common(p, estimators="pickands_rho,moment_rho")
    p.set_defaults(func=cmd_select_k)

    p = sub.add_parser("pickands-plot", help="Pickands tail index estimates for every admissible k")
    _common(p, estimators="pickands_rho")
    p.set_defaults(func=cmd_pickands_plot)

    p = sub.add_parser("simulate", help="Monte Carlo experiment on a simulated scenario")
    _common(p, estimators="fdh,knownrho:2", x_help="query points (default 0.25,0.5,1)")
    p.add_argument("--reps", type=int, default=100, help="number of replications (default 100)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    p.add_argument("--format", choices=("csv", "aligned-text"), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen", help="write a simulated dataset as CSV")
    p.add_argument("--scenario", default="triangle")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CsvParseError as err:
        print(f"error: {getattr(args, 'input', '')}: {err}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, InvalidParameter, DimensionMismatch) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

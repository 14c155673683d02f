"""Command-line front end: ``zerofinder zeros|verify|bench|order``.

Every command writes machine-readable records to stdout, either CSV or
one JSON object per line.  Exit codes: 0 success, 1 verification
mismatch, 2 unsupported parameters or interval, 3 evaluator or solver
failure, 4 too little iterate history for an order estimate.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .core import Method, estimate_order, order_from_errors, solve_zero
from .errors import EvaluatorError, InsufficientHistory, StepError, Unsupported, ZeroFinderError
from .families import (Bessel, Coulomb, Cylinder, FamilyParams, Hermite, Kummer, Legendre, build,
                       describe, family_name)
from .oracle import (ReferenceZeroSet, compare_zero_lists, extended_history, reference_config,
                     scan_and_bisect)
from .sweep import SweepFailure, SweepReport, find_zeros

EXIT_OK, EXIT_MISMATCH, EXIT_UNSUPPORTED, EXIT_EVALUATOR, EXIT_HISTORY = 0, 1, 2, 3, 4

ZERO_FIELDS = ("index", "x", "z", "iterations", "residual", "guess")
VERIFY_FIELDS = ("index", "x", "reference", "relative_error")
BENCH_FIELDS = ("family", "params", "method", "t_iter", "a_time_s", "zeros")
ORDER_FIELDS = ("iteration", "z", "error")

FAMILIES = ("legendre", "hermite", "bessel", "cylinder", "kummer", "coulomb")
BENCH_RUNS = 10


@dataclass(frozen=True)
class RunConfig:
    params: FamilyParams
    interval: Optional[tuple[float, float]] = None
    method: Method = Method.TOM
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    accelerate: bool = True
    audit: bool = False
    fmt: str = "csv"


def _require(ns, *names):
    missing = [n for n in names if getattr(ns, n) is None]
    if missing:
        raise Unsupported(f"--family {ns.family} needs " + ", ".join("--" + m for m in missing))


def params_from_args(ns) -> FamilyParams:
    fam = ns.family
    if fam in ("legendre", "hermite"):
        _require(ns, "n")
        return (Legendre if fam == "legendre" else Hermite)(ns.n)
    if fam == "bessel":
        _require(ns, "mu")
        return Bessel(ns.mu)
    if fam == "cylinder":
        _require(ns, "mu")
        return Cylinder(ns.mu, ns.alpha)
    if fam == "kummer":
        _require(ns, "a", "b")
        return Kummer(ns.a, ns.b, ns.experimental)
    if fam == "coulomb":
        _require(ns, "L")
        return Coulomb(ns.L, ns.eta)
    raise Unsupported(f"unknown family {fam!r}")


def config_from_args(ns) -> RunConfig:
    return RunConfig(params=params_from_args(ns), interval=tuple(ns.interval) if ns.interval else None,
                     method=Method(ns.method), tol=ns.tol, max_iter=ns.max_iter,
                     accelerate=not ns.no_accel, audit=getattr(ns, "audit", False), fmt=ns.format)


def audit_interval(params: FamilyParams, interval: Optional[tuple[float, float]]) -> tuple[float, float]:
    """The x-range a sweep covers, for handing to the oracle."""
    if interval is not None:
        return interval
    if isinstance(params, Legendre):
        return -1.0, 1.0
    if isinstance(params, Hermite):
        bound = math.sqrt(2.0 * params.n + 1.0)
        return -bound, bound
    return build(params)[1].default_interval()


def run_sweep(cfg: RunConfig, strict: bool = True) -> SweepReport:
    return find_zeros(cfg.params, cfg.interval, method=cfg.method, accelerate=cfg.accelerate,
                      tol=cfg.tol, max_iter=cfg.max_iter, strict=strict)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


class Emitter:
    """Writes records in CSV (header once per record kind) or JSON lines."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout
        self._writer = csv.writer(self.stream, lineterminator="\n")
        self._fields: Optional[tuple] = None

    def record(self, kind: str, fields: Sequence[str], values: dict) -> None:
        if self.fmt == "json-lines":
            obj = {"record": kind}
            obj.update({f: _clean(values[f]) for f in fields})
            self.stream.write(json.dumps(obj) + "\n")
            return
        if self._fields != tuple(fields):
            self._writer.writerow(fields)
            self._fields = tuple(fields)
        self._writer.writerow([_csv_value(values[f]) for f in fields])

    def summary(self, values: dict) -> None:
        """Footer line: ``# key=value ...`` in CSV, a summary record in JSON lines."""
        if self.fmt == "json-lines":
            obj = {"record": "summary"}
            obj.update({k: _clean(v) for k, v in values.items()})
            self.stream.write(json.dumps(obj) + "\n")
        else:
            self.stream.write("# " + " ".join(f"{k}={_csv_value(v)}" for k, v in values.items()) + "\n")


def _csv_value(v):
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_zeros(cfg: RunConfig, out: Emitter) -> int:
    report = run_sweep(cfg)
    for i, zr in enumerate(report.zeros, 1):
        out.record("zero", ZERO_FIELDS, {"index": i, "x": zr.x_star, "z": zr.z_star,
                                         "iterations": zr.iterations, "residual": zr.final_residual,
                                         "guess": zr.guess})
    footer = {"family": family_name(cfg.params), "params": describe(cfg.params),
              "method": cfg.method.value, "zeros": len(report.zeros),
              "total_iterations": report.total_iterations}
    status = EXIT_OK
    if cfg.audit:
        a, b = audit_interval(cfg.params, cfg.interval)
        rec = compare_zero_lists(report.xs, scan_and_bisect(reference_config(cfg.params), a, b))
        footer.update(matched=rec.matched, missed=rec.missed, spurious=rec.spurious,
                      max_relative_error=rec.max_relative_error)
        status = EXIT_OK if rec.clean else EXIT_MISMATCH
    out.summary(footer)
    return status


def _reference_from_file(path: str, params: FamilyParams) -> list[float]:
    with open(path) as fh:
        sets = ReferenceZeroSet.from_table(fh.read())
    fam = family_name(params)
    for s in sets:
        if s.family == fam:
            return list(s.zeros)
    raise Unsupported(f"no {fam} records in {path}")


def cmd_verify(cfg: RunConfig, out: Emitter, threshold: float, reference: Optional[str] = None) -> int:
    report = run_sweep(cfg)
    a, b = audit_interval(cfg.params, cfg.interval)
    if reference is not None:
        ref = [x for x in _reference_from_file(reference, cfg.params) if a <= x <= b]
    else:
        ref = scan_and_bisect(reference_config(cfg.params), a, b)
    rec = compare_zero_lists(report.xs, ref)
    for i, (x, r, err) in enumerate(rec.pairs, 1):
        out.record("verify", VERIFY_FIELDS, {"index": i, "x": x, "reference": r, "relative_error": err})
    ok = rec.clean and rec.max_relative_error <= threshold
    out.summary({"family": family_name(cfg.params), "params": describe(cfg.params),
                 "computed": len(report.xs), "reference": len(ref), "matched": rec.matched,
                 "missed": rec.missed, "spurious": rec.spurious,
                 "max_relative_error": rec.max_relative_error, "threshold": threshold,
                 "status": "pass" if ok else "fail"})
    return EXIT_OK if ok else EXIT_MISMATCH


def _bench_job(job: tuple[RunConfig, int]) -> dict:
    cfg, runs = job
    total = 0.0
    report = None
    for _ in range(runs):
        t0 = time.perf_counter()
        report = run_sweep(cfg, strict=False)
        total += time.perf_counter() - t0
    return {"family": family_name(cfg.params), "params": describe(cfg.params),
            "method": cfg.method.value, "t_iter": report.total_iterations,
            "a_time_s": total / runs, "zeros": len(report.zeros), "failures": len(report.failures)}


def worker_count(jobs: int) -> int:
    env = os.environ.get("ZEROFINDER_THREADS")
    limit = os.cpu_count() or 1
    if env:
        try:
            limit = max(1, int(env))
        except ValueError:
            raise Unsupported(f"ZEROFINDER_THREADS={env!r} is not an integer") from None
    return max(1, min(limit, jobs))


def cmd_bench(configs: Sequence[RunConfig], methods: Sequence[Method], out: Emitter,
              runs: int = BENCH_RUNS) -> int:
    jobs = [(RunConfig(c.params, c.interval, m, c.tol, c.max_iter, c.accelerate), runs)
            for c in configs for m in methods]
    # surface unsupported requests before spawning workers
    for c in configs:
        build(c.params)
    workers = worker_count(len(jobs))
    if workers == 1:
        rows = [_bench_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_job, jobs))
    for row in rows:
        out.record("bench", BENCH_FIELDS, row)
        if row["failures"]:
            print(f"warning: {row['family']} {row['params']} {row['method']}: "
                  f"{row['failures']} sweep failure(s)", file=sys.stderr)
    return EXIT_OK


def _order_target(cfg: RunConfig, index: int):
    """Certified plain guess and TOM zero for the ``index``-th positive zero."""
    report = find_zeros(cfg.params, cfg.interval, method=Method.TOM, accelerate=False)
    positive = [zr for zr in report.zeros if zr.x_star > 0]
    if not 1 <= index <= len(positive):
        raise Unsupported(f"index {index} outside 1..{len(positive)} (positive zeros in range)")
    return positive[index - 1]


def cmd_order(cfg: RunConfig, out: Emitter, index: int, extended: bool = False, digits: int = 80) -> int:
    target = _order_target(cfg, index)
    if extended:
        errors, limit, eps = extended_history(cfg.params, cfg.method.value, target.guess, digits)
        zs = [limit + e for e in errors]
        order = order_from_errors(errors, 10.0 * eps * max(1.0, abs(limit)))
    else:
        problem, case = build(cfg.params)
        opts = replace(case.options, method=cfg.method, max_iter=cfg.max_iter or case.options.max_iter)
        res = solve_zero(problem, target.guess, opts)
        zs, limit = res.history, target.z_star
        errors = [z - limit for z in zs]
        order = estimate_order(zs, limit)
    for m, (z, e) in enumerate(zip(zs, errors)):
        out.record("order", ORDER_FIELDS, {"iteration": m, "z": z, "error": e})
    out.summary({"family": family_name(cfg.params), "params": describe(cfg.params),
                 "method": cfg.method.value, "index": index, "z_star": limit,
                 "precision": f"{digits} digits" if extended else "double", "order": order})
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, help="polynomial degree (legendre, hermite)")
    p.add_argument("--mu", type=float, help="order (bessel, cylinder)")
    p.add_argument("--alpha", type=float, default=0.0, help="cylinder mixing angle in [0, pi)")
    p.add_argument("--a", type=float, help="kummer a < -1")
    p.add_argument("--b", type=float, help="kummer b > 0")
    p.add_argument("--experimental", action="store_true", help="allow kummer b < 1/6")
    p.add_argument("--L", type=float, help="coulomb angular momentum L > 0")
    p.add_argument("--eta", type=float, default=0.0, help="coulomb charge parameter")
    p.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--method", choices=[m.value for m in Method], default="TOM", type=str.upper)
    p.add_argument("--tol", type=float, help="override the family's stopping tolerance")
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--no-accel", action="store_true", help="plain pi/2 guesses only")
    p.add_argument("--format", choices=("csv", "json-lines"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zerofinder",
                                     description="All zeros of special functions via Riccati-ratio iteration.")
    sub = parser.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zeros", help="compute every zero in an interval")
    _family_args(z)
    z.add_argument("--audit", action="store_true", help="compare against the oracle; exit 1 on mismatch")

    v = sub.add_parser("verify", help="per-zero relative error against the oracle or a fixture")
    _family_args(v)
    v.add_argument("--threshold", type=float, default=1e-12)
    v.add_argument("--reference", help="reference table (family, params, zero, tag per line)")

    b = sub.add_parser("bench", help="iterations and mean wall time per method")
    _family_args(b)
    b.add_argument("--methods", default="TOM,NEWTON,SOM,FOM",
                   help="comma-separated methods; overrides --method")
    b.add_argument("--runs", type=int, default=BENCH_RUNS)
    b.add_argument("--config", action="append", default=[], metavar="JSON",
                   help='extra config, e.g. \'{"family": "bessel", "mu": 10}\'; repeatable')

    o = sub.add_parser("order", help="convergence order on one zero")
    _family_args(o)
    o.add_argument("--index", type=int, required=True, help="1-based index among positive zeros")
    o.add_argument("--extended", action="store_true", help="replay the iteration in mpmath")
    o.add_argument("--digits", type=int, default=80)
    return parser


def _extra_config(text: str, base) -> RunConfig:
    spec = json.loads(text)
    ns = argparse.Namespace(**{**vars(base), "n": None, "mu": None, "alpha": 0.0, "a": None, "b": None,
                               "experimental": False, "L": None, "eta": 0.0, "interval": None})
    for k, val in spec.items():
        setattr(ns, k, val)
    return config_from_args(ns)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    out = Emitter(ns.format)
    try:
        cfg = config_from_args(ns)
        if ns.command == "zeros":
            return cmd_zeros(cfg, out)
        if ns.command == "verify":
            return cmd_verify(cfg, out, ns.threshold, ns.reference)
        if ns.command == "bench":
            methods = [Method(m.strip().upper()) for m in ns.methods.split(",") if m.strip()]
            configs = [cfg] + [_extra_config(t, ns) for t in ns.config]
            return cmd_bench(configs, methods, out, ns.runs)
        return cmd_order(cfg, out, ns.index, ns.extended, ns.digits)
    except Unsupported as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except InsufficientHistory as exc:
        print(f"insufficient history: {exc}", file=sys.stderr)
        return EXIT_HISTORY
    except (EvaluatorError, StepError, SweepFailure) as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_EVALUATOR
    except ZeroFinderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVALUATOR
    except ValueError as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())

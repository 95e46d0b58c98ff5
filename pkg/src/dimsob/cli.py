"""Command-line front end.

Subcommands::

    constants --kind {rn|ball|sphere|manifold} --n-range A..B [--curvature K]
    norm      --space SPEC --profile FILE
    verify    --theorem T --space SPEC --geometry G --n N --family F [--seed S]
    sweep     --theorem T --space SPEC --geometry G --n-range A..B --family F [--jobs J]
    oracle    --suite {1d|2d|norms} --trials T [--seed S]

Exit status is 0 when every check passes, 1 when one fails and 2 on bad input.
Reports are JSON envelopes (see ``schema/report.schema.json``); ``--format csv``
gives plot-ready tables instead.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from importlib import resources

import numpy as np

from . import __version__
from .harness import (
    THEOREMS,
    ConfigError,
    ExperimentConfig,
    dimension_sweep,
    make_family,
    verify,
)
from .isoprofile import GEOMETRIES, geometry_constant
from .oracle import (
    check_oscillation,
    check_polya_szego,
    random_grid_function_1d,
    random_grid_function_2d,
    random_profile,
    riemann_norm_oracle,
)
from .rearrange import InvalidProfileError, StepProfile
from .rispace import LogRefined, LorentzPQ, Lp, SpaceError, describe, parse_space, ri_norm

SCHEMA_VERSION = "1.0"
SIG_DIGITS = 12
NORM_SUITE_RTOL = 1e-6
NORM_SUITE_RESOLUTION = 10 ** 5
VOLATILE_KEYS = ("wall_clock", "stability_hash")


class UsageError(Exception):
    """Bad arguments or inputs; maps to exit status 2."""


# ---------------------------------------------------------------------------
# number formatting and envelopes


def fmt(x) -> str:
    """Twelve significant digits; infinities and NaN spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{SIG_DIGITS}g}"


def _clean(obj):
    """Round floats to 12 significant digits and make the tree JSON-safe."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(fmt(x)) if math.isfinite(x) else fmt(x)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def stability_hash(envelope: dict) -> str:
    stable = {k: v for k, v in envelope.items() if k not in VOLATILE_KEYS}
    text = json.dumps(stable, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def make_envelope(command: list[str], seed, rows=(), reports=(), started: float | None = None) -> dict:
    reports = [r.to_dict() if hasattr(r, "to_dict") else r for r in reports]
    passed = sum(bool(r["passed"]) for r in reports)
    env = {
        "schema_version": SCHEMA_VERSION,
        "tool": "dimsob",
        "tool_version": __version__,
        "command": list(command),
        "seed": seed,
        "rows": list(rows),
        "reports": reports,
        "summary": {"passed": passed, "total": len(reports), "all_passed": passed == len(reports)},
        "wall_clock": 0.0 if started is None else time.perf_counter() - started,
    }
    env = _clean(env)
    env["stability_hash"] = stability_hash(env)
    return env


def envelope_json(envelope: dict) -> str:
    return json.dumps(envelope, sort_keys=True, indent=2) + "\n"


def rows_csv(header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row[h]) if isinstance(row[h], (float, np.floating)) else row[h] for h in header])
    return buf.getvalue()


def load_schema() -> dict:
    text = resources.files("dimsob").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {output}: {exc.strerror}") from exc


# ---------------------------------------------------------------------------
# argument helpers


def parse_range(text: str) -> range:
    """``A..B`` (inclusive) or a single integer."""
    head, sep, tail = text.partition("..")
    try:
        lo = int(head)
        hi = int(tail) if sep else lo
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected A..B") from None
    if hi < lo:
        raise UsageError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _space(text: str):
    try:
        return parse_space(text)
    except SpaceError as exc:
        raise UsageError(str(exc)) from None


def read_profile(path: str) -> StepProfile:
    """Two-column CSV ``breakpoint,value`` with an optional header row."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if rows and rows[0][0].strip().lower() == "breakpoint":
        rows = rows[1:]
    try:
        data = np.array([[float(a), float(b)] for a, b in rows])
        return StepProfile(data[:, 0], data[:, 1])
    except (ValueError, IndexError, InvalidProfileError) as exc:
        raise UsageError(f"bad profile file {path}: {exc}") from None


def default_seed() -> int:
    raw = os.environ.get("DIMSOB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"DIMSOB_SEED must be an integer, got {raw!r}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(args, argv, started) -> int:
    if args.kind not in GEOMETRIES:
        raise UsageError(f"unknown kind {args.kind!r}")
    rows = []
    for n in parse_range(args.n_range):
        try:
            value = geometry_constant(args.kind, n, args.curvature, args.variant)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rows.append({"kind": args.kind, "n": n, "value": value})
    if args.format == "csv":
        _emit(rows_csv(["kind", "n", "value"], rows), args.output)
    else:
        _emit(envelope_json(make_envelope(argv, None, rows, (), started)), args.output)
    return 0


def cmd_norm(args, argv, started) -> int:
    space = _space(args.space)
    profile = read_profile(args.profile)
    value = ri_norm(space, profile)
    rows = [{"space": describe(space), "value": value}]
    if args.format == "csv":
        _emit(rows_csv(["space", "value"], rows), args.output)
    else:
        _emit(envelope_json(make_envelope(argv, None, rows, (), started)), args.output)
    return 0


def _config(args, n: int) -> ExperimentConfig:
    return ExperimentConfig(
        theorem=args.theorem,
        space=_space(args.space),
        geometry=args.geometry,
        n=n,
        family=args.family,
        seed=args.seed,
        samples=args.samples,
        rtol=args.rtol,
        resolution=args.resolution,
        k=args.k,
    )


def cmd_verify(args, argv, started) -> int:
    report = verify(_config(args, args.n))
    env = make_envelope(argv, args.seed, (), [report], started)
    _emit(envelope_json(env), args.output)
    return 0 if env["summary"]["all_passed"] else 1


def cmd_sweep(args, argv, started) -> int:
    configs = [_config(args, n) for n in parse_range(args.n_range)]
    for cfg in configs:
        make_family(cfg.geometry, cfg.n, cfg.family)
    rows = dimension_sweep(configs, jobs=args.jobs)
    table = [
        {
            "n": r.n,
            "ratio": r.ratio,
            "constant": r.constant,
            "max_so_far": r.max_so_far,
            "mc_halfwidth": r.mc_halfwidth,
            "passed": r.passed,
            "error": r.error,
        }
        for r in rows
    ]
    for r in rows:
        if r.error:
            print(f"n={r.n}: {r.error}", file=sys.stderr)
    if args.format == "csv":
        _emit(rows_csv(["n", "ratio", "constant", "max_so_far"], table), args.output)
    else:
        reports = [{"name": f"sweep n={t['n']}", "passed": t["passed"]} for t in table]
        _emit(envelope_json(make_envelope(argv, args.seed, table, reports, started)), args.output)
    return 0 if all(r.passed for r in rows) else 1


def _norm_trial(rng: np.random.Generator):
    space = [Lp(1.0), Lp(2.0), Lp(3.5), LorentzPQ(2.0, 1.0), LorentzPQ(3.0, 2.0), LogRefined(Lp(2.0), 1, "ln")][
        rng.integers(6)
    ]
    profile = random_profile(rng)
    fast = ri_norm(space, profile)
    slow = riemann_norm_oracle(space, profile, NORM_SUITE_RESOLUTION)
    gap = abs(fast - slow)
    report = {
        "name": f"norm {describe(space)}",
        "lhs": gap,
        "rhs": NORM_SUITE_RTOL * abs(slow),
        "passed": bool(gap <= NORM_SUITE_RTOL * abs(slow)),
        "metadata": {"quadrature": fast, "riemann": slow, "steps": profile.size},
    }
    return report


def _combined(*parts) -> dict:
    """One trial, several checks: passes when all of them do."""
    return {
        "name": "+".join(p.name for p in parts),
        "passed": all(p.passed for p in parts),
        "metadata": {"checks": [p.to_dict() for p in parts]},
    }


def cmd_oracle(args, argv, started) -> int:
    if args.trials < 0:
        raise UsageError("trials must be non-negative")
    rng = np.random.default_rng(args.seed)
    reports = []
    for _ in range(args.trials):
        if args.suite == "1d":
            f = random_grid_function_1d(rng)
            reports.append(_combined(check_oscillation(f), check_polya_szego(f)))
        elif args.suite == "2d":
            reports.append(check_oscillation(random_grid_function_2d(rng)))
        else:
            reports.append(_norm_trial(rng))
    env = make_envelope(argv, args.seed, (), reports, started)
    _emit(envelope_json(env), args.output)
    s = env["summary"]
    print(f"{args.suite}: {s['passed']}/{s['total']} checks passed", file=sys.stderr)
    return 0 if s["all_passed"] else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimsob", description="Dimension-free Sobolev constants and checks.")
    parser.add_argument("--version", action="version", version=f"dimsob {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def out(p, formats=("json",)):
        p.add_argument("--output", "-o", default=None, help="file to write (default: standard output)")
        if len(formats) > 1:
            p.add_argument("--format", choices=formats, default=formats[0])

    p = sub.add_parser("constants", help="tables of transference constants")
    p.add_argument("--kind", required=True, choices=GEOMETRIES)
    p.add_argument("--n-range", required=True)
    p.add_argument("--curvature", type=float, default=1.0)
    p.add_argument("--variant", choices=("computed", "printed", "theorem"), default="computed")
    out(p, ("csv", "json"))
    p.set_defaults(run=cmd_constants)

    p = sub.add_parser("norm", help="norm of a step profile read from CSV")
    p.add_argument("--space", required=True)
    p.add_argument("--profile", required=True)
    out(p, ("json", "csv"))
    p.set_defaults(run=cmd_norm)

    def experiment(p, n_flag):
        p.add_argument("--theorem", required=True, choices=THEOREMS)
        p.add_argument("--space", required=True)
        p.add_argument("--geometry", required=True)
        if n_flag == "n":
            p.add_argument("--n", type=int, required=True)
        else:
            p.add_argument("--n-range", required=True)
        p.add_argument("--family", default="radial:linear")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=10 ** 5)
        p.add_argument("--resolution", type=int, default=512)
        p.add_argument("--rtol", type=float, default=1e-10)
        p.add_argument("--k", type=int, default=1)

    p = sub.add_parser("verify", help="check one inequality on one test function")
    experiment(p, "n")
    out(p)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("sweep", help="ratio of the two sides across dimensions")
    experiment(p, "range")
    p.add_argument("--jobs", type=int, default=1)
    out(p, ("csv", "json"))
    p.set_defaults(run=cmd_sweep)

    p = sub.add_parser("oracle", help="randomized brute-force suites")
    p.add_argument("--suite", required=True, choices=("1d", "2d", "norms"))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    out(p)
    p.set_defaults(run=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 for --help / --version
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = default_seed()
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        return args.run(args, argv, started)
    except (UsageError, ConfigError, SpaceError) as exc:
        print(f"dimsob: error: {exc}", file=sys.stderr)
        return 2


def run(argv: list[str] | None = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    shrinkerlab models list
    shrinkerlab volume --model cylinder:m=2,k=1
    shrinkerlab frequency --model gaussian:k=3 --modes poly:d=1,idx=0,c=1 --alpha 2
    shrinkerlab verify --model gaussian:k=3 --seed 0 --out report.json
    shrinkerlab doubling --model gaussian:k=3 --modes "poly:d=0;poly:d=2,idx=1" --T 16 --lam 2
    shrinkerlab dimension --model gaussian:k=3 --d-max 3

Every flag can also be set from the environment as SHRINKERLAB_<FLAG>,
e.g. SHRINKERLAB_SEED=7 or SHRINKERLAB_TOL_REL=1e-8; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import frequency as fr
from . import theorems as th
from .geometry import RigidShrinker, coarea_check
from .harmonics import growth_order
from .parsing import DescriptorError, combination_to_json, parse_model, parse_modes
from .quadrature import DEFAULT_TOL_ABS, DEFAULT_TOL_REL
from .report import SCHEMA_VERSION, _sanitize
from .suite import run_verification

ENV_PREFIX = "SHRINKERLAB_"
CSV_VERSION = 1

log = logging.getLogger("shrinkerlab")


def _env_default(name: str, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(f"error: environment {ENV_PREFIX}{name.upper()}={raw!r} is not a valid value")


def _common(p: argparse.ArgumentParser, modes=False, alpha=False, grid=False):
    p.add_argument("--model", default=_env_default("model", "gaussian:k=3"),
                   help="gaussian:k=<int> or cylinder:m=<int>,k=<int>")
    if modes:
        p.add_argument("--modes", nargs="+", default=_env_default("modes", None, lambda s: [s]),
                       help="poly:d=<int>,idx=<int>,c=<float> and/or exp:j=<int>,parity=even|odd,c=<float>")
    if alpha:
        p.add_argument("--alpha", type=float, default=_env_default("alpha", 2.0, float))
    if grid:
        p.add_argument("--t-min", type=float, default=_env_default("t_min", 1e-2, float))
        p.add_argument("--t-max", type=float, default=_env_default("t_max", 1e2, float))
        p.add_argument("--ppd", type=int, default=_env_default("ppd", 40, int), help="points per decade")
        p.add_argument("--spacing", choices=("log", "linear"), default=_env_default("spacing", "log"))
    p.add_argument("--tol-rel", type=float, default=_env_default("tol_rel", DEFAULT_TOL_REL, float))
    p.add_argument("--tol-abs", type=float, default=_env_default("tol_abs", DEFAULT_TOL_ABS, float))
    p.add_argument("--mc-samples", type=int, default=_env_default("mc_samples", 100_000, int))
    p.add_argument("--seed", type=int, default=_env_default("seed", 0, int))
    p.add_argument("--out", default=_env_default("out", None), help="output path stem or file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shrinkerlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("models", help="catalog of constructible model shrinkers")
    p.add_argument("action", nargs="?", choices=("list",), default="list")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--out", default=None)

    p = sub.add_parser("volume", help="sublevel volume and boundary area table")
    _common(p, grid=True)

    p = sub.add_parser("frequency", help="H, J, h, N profile as CSV plus JSON summary")
    _common(p, modes=True, alpha=True, grid=True)
    p.add_argument("--engine", choices=("auto", "closed-form", "quadrature", "both"), default="auto")

    p = sub.add_parser("verify", help="run the full identity matrix and write a JSON report",
                       description="Runs the full identity matrix. All identities are relative comparisons, "
                                   "so quadrature inside verify uses the relative tolerance only; "
                                   "--tol-abs is recorded in the report settings.")
    _common(p, modes=True)

    p = sub.add_parser("doubling", help="doubling exponents over a window (1, T)")
    _common(p, modes=True, alpha=True)
    p.add_argument("--T", type=float, default=16.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--points", type=int, default=20)

    p = sub.add_parser("dimension", help="dimension table of the constructed harmonic family")
    p.add_argument("--model", default=_env_default("model", "gaussian:k=3"))
    p.add_argument("--d-max", type=int, default=6)
    p.add_argument("--out", default=None)
    return parser


def make_grid(args) -> np.ndarray:
    if not (0 < args.t_min < args.t_max):
        raise SystemExit("error: need 0 < --t-min < --t-max")
    if args.ppd < 1:
        raise SystemExit("error: --ppd must be positive")
    decades = math.log10(args.t_max / args.t_min)
    n = max(int(round(decades * args.ppd)) + 1, 2)
    if args.spacing == "log":
        return np.geomspace(args.t_min, args.t_max, n)
    return np.linspace(args.t_min, args.t_max, n)


def _csv_text(header: str, columns: list, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {header} csv v{CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(_sanitize(obj), sort_keys=True, indent=2) + "\n"


def _emit(args, csv_text=None, json_obj=None) -> None:
    """Write artifacts next to --out (stem.csv / stem.json) or to stdout."""
    if args.out:
        stem = Path(args.out)
        if stem.suffix in (".csv", ".json"):
            stem = stem.with_suffix("")
        stem.parent.mkdir(parents=True, exist_ok=True)
        if csv_text is not None:
            stem.with_suffix(".csv").write_text(csv_text, encoding="utf-8", newline="\n")
        if json_obj is not None:
            stem.with_suffix(".json").write_text(_json_text(json_obj), encoding="utf-8", newline="\n")
        return
    if csv_text is not None:
        sys.stdout.write(csv_text)
    elif json_obj is not None:
        sys.stdout.write(_json_text(json_obj))


def cmd_models(args) -> int:
    rows = []
    for n in range(1, args.max_n + 1):
        rows.append(RigidShrinker.gaussian(n))
        for m in range(2, n):
            rows.append(RigidShrinker.cylinder(m, n - m))
    attained = sorted({Fraction(r.m, 2) for r in rows})
    print(f"{'descriptor':24s} {'n':>3s} {'k':>3s} {'R':>5s} {'n/2-R':>6s} {'V_N':>12s}")
    for r in rows:
        print(f"{r.descriptor:24s} {r.n:3d} {r.k:3d} {str(r.R_exact):>5s} {str(Fraction(r.k, 2)):>6s} "
              f"{r.factor.volume:12.6f}")
    print("attainable R: {" + ", ".join(str(v) for v in attained) + "}  (R = 1/2 never occurs: m = 1 is excluded)")
    if args.out:
        Path(args.out).write_text(_json_text({
            "schema_version": SCHEMA_VERSION,
            "models": [r.to_json() for r in rows],
            "attainable_R": [str(v) for v in attained],
        }), encoding="utf-8")
    return 0


def cmd_volume(args) -> int:
    model = parse_model(args.model)
    t = make_grid(args)
    rows = [(s, 2 * math.sqrt(s), model.sublevel_volume(s), model.boundary_area(s)) for s in t]
    entry = coarea_check(model, t)
    _emit(args, _csv_text("shrinkerlab volume", ["t", "rho", "volume", "area"], rows),
          {"schema_version": SCHEMA_VERSION, "model": model.to_json(), "coarea": entry.to_json()}
          if args.out else None)
    return 0 if entry.passed else 1


def _modes(args, model):
    if not args.modes:
        raise SystemExit("error: --modes is required for this command")
    u = parse_modes(args.modes)
    from .harmonics import validate

    validate(u, model)
    return u


def cmd_frequency(args) -> int:
    model = parse_model(args.model)
    u = _modes(args, model)
    t = make_grid(args)
    qkw = {"tol_rel": min(args.tol_rel, 1e-10), "tol_abs": args.tol_abs}
    prof = fr.frequency_profile(model, u, args.alpha, t, args.engine, **qkw)
    eng = "quadrature" if prof.engine == "quadrature" else "closed-form"
    if args.alpha > 0:
        ode = fr.ode_residuals(model, u, args.alpha, t, eng, **qkw)
    else:
        ode = np.full(t.size, np.nan)
    rows = [(float(s), H, J, h, N, prof.engine, r) for s, H, J, h, N, r in
            zip(t, prof.H, prof.J, prof.h, prof.N, ode)]
    csv_text = _csv_text("shrinkerlab frequency", ["t", "H", "J", "h", "N", "engine", "ode_residual"], rows)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "model": model.to_json(),
        "modes": combination_to_json(u),
        "alpha": args.alpha,
        "engine": prof.engine,
        "points": int(t.size),
        "N_min": float(prof.N.min()),
        "N_max": float(prof.N.max()),
        "ode_residual_max": float(np.nanmax(ode)) if args.alpha > 0 else None,
        "growth_order": growth_order(u),
        **prof.extra,
    }
    _emit(args, csv_text, summary if args.out else None)
    return 0


def cmd_verify(args) -> int:
    model = parse_model(args.model)
    u = _modes(args, model) if args.modes else None
    report = run_verification(model, u, seed=args.seed, tol_rel=args.tol_rel, tol_abs=args.tol_abs,
                              mc_samples=args.mc_samples)
    text = report.dumps()
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    for line in report.summary_lines():
        print(line)
    return 0 if report.ok else 1


def cmd_doubling(args) -> int:
    model = parse_model(args.model)
    u = _modes(args, model)
    recs = th.doubling_check(model, u, args.alpha, args.T, eps=args.eps, lam=args.lam, points=args.points)
    cols = ["t", "ratio", "L_emp", "L_tight", "L_apriori", "lambda_min", "verdict"]
    rows = [[getattr(r, c) for c in cols] for r in recs]
    entry = th.doubling_entry(model, u, args.alpha, args.T, args.eps, args.lam, recs)
    _emit(args, _csv_text("shrinkerlab doubling", cols, rows),
          {"schema_version": SCHEMA_VERSION, "model": model.to_json(), "entry": entry.to_json()}
          if args.out else None)
    return 0 if entry.passed else 1


def cmd_dimension(args) -> int:
    model = parse_model(args.model)
    table = th.dimension_table(model, args.d_max)
    entry = th.dimension_entry(model, args.d_max)
    kind = entry.details["kind"]
    print(f"# {model.descriptor}: {kind} dimension, degree cap d")
    print("d,dim")
    for d, dim in table:
        print(f"{d},{dim}")
    if args.out:
        Path(args.out).write_text(_json_text({"schema_version": SCHEMA_VERSION, "model": model.to_json(),
                                              "entry": entry.to_json()}), encoding="utf-8")
    return 0 if entry.passed else 1


COMMANDS = {
    "models": cmd_models,
    "volume": cmd_volume,
    "frequency": cmd_frequency,
    "verify": cmd_verify,
    "doubling": cmd_doubling,
    "dimension": cmd_dimension,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except DescriptorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

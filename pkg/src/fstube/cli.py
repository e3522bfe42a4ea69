"""Command-line entry point ``fstube``.

Every command prints one JSON report on stdout (sorted keys, floats at full
``repr`` precision) and optionally writes it, or a CSV radius table, to
``--out``.  Exit status: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from math import asin, isfinite, pi, sqrt
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT, Tolerances
from .fs_core import projective_volume
from .polynomial import PolynomialFormatError, load_document, parse_polynomial
from .riccati import (
    RiccatiBranch,
    StepTooLargeError,
    min_focal_distance_estimate,
    riccati_closed_form,
    riccati_integrate_batch,
    riccati_integrate_numeric,
)
from .submanifold import (
    EmbeddedSubmanifold,
    Hypersurface,
    ProjectiveSubspace,
    RationalCurve,
    SubmanifoldError,
    curve_volume,
    model,
    parse_curve,
)
from .tube_volume import (
    VARIANTS,
    ChernIntegrals,
    TubeVolumeError,
    arbitrate_variant,
    gray_tube_volume_general,
    mc_tube_volume,
    tube_volume_hypersurface,
)
from .verify import SUITES, _clean, constant_spectrum_scan, run_suite

__all__ = ["main", "build_parser", "InputError"]

DEFAULT_SEED = 0
COMMANDS = ("focal", "tube-volume", "mc-volume", "riccati", "spectrum", "verify", "curve-volume")


class InputError(ValueError):
    """Bad command-line input; reported with exit status 2."""


# -- parsing ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser, model_flags: bool = True, radius: bool = False) -> None:
    if model_flags:
        src = p.add_mutually_exclusive_group()
        src.add_argument("--model", help="built-in model tag (linear, point, quadric, fermat-d, segre-k, rational-normal-d, ruling, conic)")
        src.add_argument("--input", type=Path, help="JSON polynomial or curve document")
        p.add_argument("--n", type=int, help="ambient dimension of CP^n")
        p.add_argument("--d", type=int, help="degree")
        p.add_argument("--k", type=int, help="complex dimension of a linear model or Segre factor")
    if radius:
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--r", type=float, action="append", help="radius (repeatable)")
        grp.add_argument("--r-grid", help="radius grid START:STOP:COUNT (inclusive)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--workers", type=int, default=1, help="worker processes for sampling")
    p.add_argument("--variant", choices=("as-printed", "corrected", "auto"), default="auto",
                   help="hypersurface tube-volume normalization (auto resolves by arbitration)")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="tolerance override (repeatable)")
    p.add_argument("--out", type=Path, help="write the report (.json) or a radius table (.csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fstube", description="Focal distances and tube volumes of complex submanifolds of CP^n.")
    parser.add_argument("--version", action="version", version=f"fstube {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("focal", help="sampled minimal focal distance")
    _common(p)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--normals", type=int, default=10)

    p = sub.add_parser("tube-volume", help="closed-form tube volume")
    _common(p, radius=True)

    p = sub.add_parser("mc-volume", help="Monte Carlo tube volume")
    _common(p, radius=True)
    p.add_argument("--samples", type=int, default=1_000_000)

    p = sub.add_parser("riccati", help="closed form versus RK4 for one principal-curvature branch")
    _common(p, model_flags=False, radius=True)
    p.add_argument("--kappa", type=float, default=1.0, choices=(1.0, 2.0))
    start = p.add_mutually_exclusive_group()
    start.add_argument("--theta", type=float, help="phase in [0, pi/kappa)")
    start.add_argument("--lam0", type=float, help="initial value lambda(0); -inf allowed")
    p.add_argument("--step", type=float, default=0.01)

    p = sub.add_parser("spectrum", help="shape-operator spectra across samples")
    _common(p)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--normals", type=int, default=1)

    p = sub.add_parser("verify", help="run an experiment suite")
    _common(p, model_flags=False)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples per volume case")

    p = sub.add_parser("curve-volume", help="volume of a rational curve and its degree ratios")
    _common(p, radius=True)
    return parser


def _tolerances(items) -> Tolerances:
    if not items:
        return DEFAULT
    kw = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or name not in Tolerances.__dataclass_fields__:
            raise InputError(f"--tol: expected NAME=VALUE with NAME a known tolerance, got {item!r}")
        kind = type(getattr(DEFAULT, name))
        try:
            kw[name] = kind(value)
        except ValueError:
            raise InputError(f"--tol {name}: cannot parse {value!r} as {kind.__name__}") from None
    return DEFAULT.with_overrides(**kw)


def _radii(args, required: bool = True) -> list[float]:
    if args.r_grid:
        parts = args.r_grid.split(":")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except (IndexError, ValueError):
            raise InputError(f"--r-grid: expected START:STOP:COUNT, got {args.r_grid!r}") from None
        if len(parts) != 3 or count < 1:
            raise InputError("--r-grid: expected START:STOP:COUNT with COUNT >= 1")
        radii = np.linspace(start, stop, count).tolist()
    elif args.r:
        radii = list(args.r)
    elif required:
        raise InputError("a radius is required (--r or --r-grid)")
    else:
        return []
    for r in radii:
        if not (isfinite(r) and 0.0 <= r <= pi / 2):
            raise InputError(f"radius {r!r} outside [0, pi/2]")
    return radii


def _load_input(path: Path):
    try:
        doc = load_document(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if "components" in doc:
        return parse_curve(doc), doc
    return Hypersurface(parse_polynomial(doc), name=path.name), doc


def _submanifold(args) -> tuple[EmbeddedSubmanifold, dict]:
    if args.input is not None:
        X, doc = _load_input(args.input)
        return X, {"input": str(args.input), "document": doc}
    if not args.model:
        raise InputError("one of --model or --input is required")
    tag = args.model.lower()
    if tag == "hypersurface" and args.d is None:
        raise InputError("--model hypersurface needs --d")
    try:
        X = model(tag, n=args.n, k=args.k, d=args.d)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    spec = {"model": tag, "n": args.n, "d": args.d, "k": args.k}
    return X, {k: v for k, v in spec.items() if v is not None}


def _digest(obj) -> str:
    if isinstance(obj, dict) and "document" in obj:
        obj = obj["document"]
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _canonical_variant() -> str:
    return arbitrate_variant().canonical or "corrected"


def _resolve_variant(requested: str) -> str:
    return _canonical_variant() if requested == "auto" else requested


# -- closed forms ------------------------------------------------------------------

def _closed_forms(X: EmbeddedSubmanifold, r: float) -> dict:
    """Closed-form tube volumes available for X, keyed by formula name."""
    out: dict = {}
    if isinstance(X, Hypersurface):
        for v in VARIANTS:
            out[v] = float(tube_volume_hypersurface(X.n, X.d, r, v))
    elif isinstance(X, ProjectiveSubspace):
        ci = ChernIntegrals.point() if X.k == 0 else ChernIntegrals.linear(X.k)
        out["gray"] = float(gray_tube_volume_general(ci, X.n, r))
    elif isinstance(X, RationalCurve):
        cv = curve_volume(X)
        out["gray"] = float(gray_tube_volume_general(ChernIntegrals.curve(volume=cv.volume), X.n, r))
    return out


def _reference(closed: dict, variant: str):
    if variant in closed:
        return closed[variant]
    return closed.get("gray")


# -- commands -------------------------------------------------------------------

def _report(claim, inputs, values, passed, margins, seed, variant, digest) -> dict:
    return {
        "claim": claim,
        "inputs": _clean(inputs),
        "values": _clean(values),
        "pass": bool(passed),
        "margins": _clean(margins),
        "seed": seed,
        "variant": variant,
        "version": __version__,
        "input_digest": digest,
    }


def cmd_focal(args, tol):
    X, spec = _submanifold(args)
    if args.points < 1 or args.normals < 1:
        raise InputError("--points and --normals must be positive")
    est = min_focal_distance_estimate(X, args.points, args.normals, np.random.default_rng(args.seed), tol)
    values = est.to_dict()
    margins = {}
    passed = est.failures == 0 and 0.0 < est.estimate <= pi / 2 + 1e-12
    variant = _resolve_variant(args.variant)
    if isinstance(X, Hypersurface):
        bound = asin(1.0 / sqrt(X.d)) if variant == "corrected" else 0.5 * asin(1.0 / sqrt(X.d))
        values["degree_bound"] = bound
        margins["bound_minus_estimate"] = bound - est.estimate
    inputs = {**spec, "points": args.points, "normals": args.normals}
    return _report("minimal focal distance estimate", inputs, values, passed, margins, args.seed, variant, _digest(spec)), None


def cmd_tube_volume(args, tol):
    X, spec = _submanifold(args)
    radii = _radii(args)
    variant = _resolve_variant(args.variant)
    rows = []
    for r in radii:
        closed = _closed_forms(X, r)
        if not closed:
            raise InputError(f"no closed-form tube volume for {X.describe()['name']}")
        value = _reference(closed, variant)
        # past the focal distance the polynomial stops measuring the tube and
        # can leave [0, Vol(CP^n)]; such rows are flagged rather than hidden
        admissible = bool(-1e-12 <= value <= projective_volume(X.n) * (1 + 1e-12))
        rows.append({"r": r, **closed, "value": value, "admissible": admissible})
    values = {"table": rows}
    if len(rows) == 1:
        values["value"] = rows[0]["value"]
    inputs = {**spec, "r": radii}
    return _report("closed-form tube volume", inputs, values, True, {}, args.seed, variant, _digest(spec)), rows


def cmd_mc_volume(args, tol):
    X, spec = _submanifold(args)
    radii = _radii(args)
    if args.samples < 1000:
        raise InputError("--samples must be at least 1000")
    if args.workers < 1:
        raise InputError("--workers must be positive")
    variant = _resolve_variant(args.variant)
    reports = mc_tube_volume(X, radii, args.samples, args.seed, args.workers, tol)
    rows, margins, passed = [], {}, True
    for r, rep in zip(radii, reports):
        closed = _closed_forms(X, r)
        ref = _reference(closed, variant)
        row = {"r": r, **closed, "mc": rep.value, "stderr": rep.stderr}
        if ref is not None and rep.stderr > 0:
            z = (rep.value - ref) / rep.stderr
            row["z"] = z
            passed &= abs(z) <= 3.0
        elif ref is not None:
            passed &= abs(rep.value - ref) <= 1e-12
        rows.append(row)
    margins["max_abs_z"] = max((abs(row["z"]) for row in rows if "z" in row), default=None)
    values = {"table": rows, "failures": reports[0].failures if reports else 0}
    inputs = {**spec, "r": radii, "samples": args.samples, "workers": args.workers}
    return _report("Monte Carlo tube volume", inputs, values, passed, margins, args.seed, variant, _digest(spec)), rows


def cmd_riccati(args, tol):
    kappa = args.kappa
    try:
        if args.lam0 is not None:
            branch = RiccatiBranch.from_initial(kappa, args.lam0)
        else:
            branch = RiccatiBranch(kappa, pi / (2 * kappa) if args.theta is None else args.theta, 1)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.step <= 0:
        raise InputError("--step must be positive")
    radii = _radii(args, required=False) or np.linspace(0.0, pi / 2, 33).tolist()
    r_max = max(radii)
    try:
        traj = riccati_integrate_numeric(branch, r_max, args.step, tol=tol)
    except StepTooLargeError as exc:
        raise InputError(str(exc)) from None
    rows, worst = [], 0.0
    for r in radii:
        exact = riccati_closed_form(branch, r)
        hit = np.flatnonzero(np.abs(traj.radii - r) <= 1e-12)
        if hit.size:
            num = float(traj.values[0, hit[0]])
        else:
            num = float(riccati_integrate_batch([kappa], [branch.theta], r, args.step, tol=tol).values[0, -1])
        row = {"r": r, "closed_form": exact, "numeric": num}
        if isfinite(exact) and abs(exact) < tol.riccati_switch and isfinite(num):
            row["abs_error"] = abs(num - exact)
            worst = max(worst, row["abs_error"])
        rows.append(row)
    expected = _expected_blowups(branch, r_max)
    found = list(traj.blowups[0])
    blow_err = max((abs(a - b) for a, b in zip(found, expected)), default=0.0) if len(found) == len(expected) else float("inf")
    passed = worst <= 1e-8 and blow_err <= 1e-6
    values = {"table": rows, "blowups_numeric": found, "blowups_closed_form": expected}
    margins = {"max_value_error": worst, "max_blowup_error": blow_err}
    inputs = {"kappa": kappa, "theta": branch.theta, "step": args.step, "r": radii}
    return _report("Riccati closed form versus RK4", inputs, values, passed, margins, args.seed, _resolve_variant(args.variant), _digest(inputs)), rows


def _expected_blowups(branch: RiccatiBranch, r_max: float) -> list[float]:
    period = pi / branch.kappa
    first = branch.blowup_radius
    out = []
    r = first
    while r <= r_max + 1e-12:
        out.append(r)
        r += period
    return out


def cmd_spectrum(args, tol):
    X, spec = _submanifold(args)
    if args.points < 1 or args.normals < 1:
        raise InputError("--points and --normals must be positive")
    rep = constant_spectrum_scan(X, args.points, args.normals, args.seed, tol=tol)
    d = rep.to_dict()
    d["variant"] = _resolve_variant(args.variant)
    d["input_digest"] = _digest(spec)
    d["inputs"] = _clean({**spec, **d["inputs"]})
    return d, None


def cmd_verify(args, tol):
    if args.workers < 1:
        raise InputError("--workers must be positive")
    if args.samples < 1000:
        raise InputError("--samples must be at least 1000")
    reports = run_suite(args.suite, args.seed, args.workers, args.samples, tol)
    items = [r.to_dict() for r in reports]
    spec = {"suite": args.suite, "samples": args.samples, "workers": args.workers}
    out = {
        "claim": f"verification suite '{args.suite}'",
        "inputs": spec,
        "reports": items,
        "values": {"passed": sum(r.passed for r in reports), "total": len(reports)},
        "pass": all(r.passed for r in reports),
        "margins": {},
        "seed": args.seed,
        "variant": _resolve_variant(args.variant),
        "version": __version__,
        "input_digest": _digest(spec),
    }
    return out, None


def cmd_curve_volume(args, tol):
    X, spec = _submanifold(args)
    if not isinstance(X, RationalCurve):
        raise InputError("curve-volume needs a rational curve (curve document or curve model)")
    cv = curve_volume(X)
    values = {
        "volume": cv.volume,
        "quadrature_error": cv.error,
        "degree_if_vol_over_pi": cv.ratio_to_line,
        "degree_if_vol_over_2pi": cv.ratio_to_2pi,
        "parametrization_degree": X.d,
    }
    rows = []
    radii = _radii(args, required=False)
    if radii:
        ci = ChernIntegrals.curve(volume=cv.volume)
        rows = [{"r": r, "gray": float(gray_tube_volume_general(ci, X.n, r))} for r in radii]
        values["table"] = rows
    passed = cv.error <= 1e-8 * max(1.0, cv.volume)
    margins = {"quadrature_error": cv.error}
    return _report("volume of a rational curve", {**spec, "r": radii}, values, passed, margins, args.seed,
                   _resolve_variant(args.variant), _digest(spec)), rows or None


HANDLERS = {
    "focal": cmd_focal,
    "tube-volume": cmd_tube_volume,
    "mc-volume": cmd_mc_volume,
    "riccati": cmd_riccati,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "curve-volume": cmd_curve_volume,
}


# -- output -------------------------------------------------------------------

def _dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_csv(path: Path, rows: list[dict]) -> None:
    fields: list[str] = []
    for row in rows:
        fields += [k for k in row if k not in fields]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else repr(row[k]) if isinstance(row[k], float) else row[k]) for k in fields})


def main(argv=None) -> int:
    """Run the CLI and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        tol = _tolerances(args.tol)
        report, rows = HANDLERS[args.command](args, tol)
    except PolynomialFormatError as exc:
        print(f"error: malformed document: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SubmanifoldError, TubeVolumeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = _dumps(report)
    sys.stdout.write(text)
    if args.out is not None:
        if args.out.suffix.lower() == ".csv":
            if not rows:
                print("error: this command has no radius table for CSV output", file=sys.stderr)
                return 2
            _write_csv(args.out, rows)
        else:
            args.out.write_text(text, encoding="utf-8")
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 infeasible computation or failed check, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, sampling
from .acceptance import CRITERIA, run_criterion
from .berkcurve import (
    TRIVIAL,
    ClosedPoint,
    PshError,
    Valuation,
    d1,
    dual_energy,
    energy,
    entropy,
    mabuchi,
    monge_ampere,
    potential_eval,
    solve_ma,
    stability_report,
)
from .berkcurve.io import (
    InputError,
    load_potential,
    parse_fsdata,
    parse_measure,
    potential_to_dot,
    read_json,
    report_to_csv,
    report_to_json,
)
from .berkcurve.measure import InfeasibleMeasureError
from .berkcurve.points import to_fraction
from .hermnorm import HermitianNorm, codiagonalize, convexity_gap, flat_embed, herm_distance, herm_geodesic
from .nanorm import NANorm, na_codiagonalize, na_distance
from .radial import isometry_check
from .symnorm import SymmetricNormSpec, lp, topk

__all__ = ["main", "build_parser"]


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _float_str(x: float) -> str:
    return format(float(x), ".17g")


def _scalar(x) -> str:
    return str(x) if isinstance(x, Fraction) else _float_str(x)


def parse_norm(text: str) -> SymmetricNormSpec:
    """``l1``, ``l2``, ``linf``, ``lp:P``, ``topk:W1,W2,...`` or a JSON file.

    The dimension is a placeholder; it is fitted to the inputs at use.
    """
    t = text.strip()
    if t in ("l1", "l2", "linf"):
        return lp({"l1": 1, "l2": 2, "linf": "inf"}[t], 1)
    if t.startswith("lp:"):
        p = t[3:]
        return lp("inf" if p == "inf" else float(p), 1)
    if t.startswith("topk:"):
        w = [Fraction(x) for x in t[5:].split(",") if x]
        return topk(w)
    if Path(t).is_file():
        data, _ = read_json(t)
        return SymmetricNormSpec.from_json(data, n=data.get("n", 1))
    raise ValueError(f"unknown norm {text!r}")


def _field(data: dict, key: str, path: str, text: str):
    if key not in data:
        raise InputError(path, None, key, "missing")
    return data[key]


def load_hermitian(path: str) -> HermitianNorm:
    data, text = read_json(path)
    try:
        if "gram" in data:
            return HermitianNorm.from_json(data)
        if "basis" in data:
            vals = _field(data, "values", path, text)
            return flat_embed(NANorm.from_json(data).basis, [float(Fraction(str(v))) for v in vals])
    except InputError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(path, None, "gram" if "gram" in data else "basis", str(exc)) from None
    raise InputError(path, 1, "gram", "missing (or give 'basis' and 'values')")


def load_na(path: str) -> NANorm:
    data, text = read_json(path)
    try:
        _field(data, "basis", path, text)
        _field(data, "values", path, text)
        return NANorm.from_json(data)
    except InputError:
        raise
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        raise InputError(path, None, "basis", str(exc)) from None


def _hermitian_json(chi: HermitianNorm) -> dict:
    return chi.to_json()


def _emit(args, payload) -> None:
    """Write ``payload`` (str, or JSON-able dict) to --out or stdout."""
    if isinstance(payload, str):
        out = payload if payload.endswith("\n") else payload + "\n"
    else:
        out = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _emit_scalar(args, value, label: str = "value") -> None:
    if args.format == "json":
        _emit(args, {label: _scalar(value)})
    else:
        _emit(args, _scalar(value))


# hermitian side


def cmd_herm_dist(args):
    a, b = load_hermitian(args.a), load_hermitian(args.b)
    _emit_scalar(args, herm_distance(parse_norm(args.norm), a, b), "distance")


def cmd_herm_geodesic(args):
    a, b = load_hermitian(args.a), load_hermitian(args.b)
    _emit(args, {"gram": _hermitian_json(herm_geodesic(a, b, args.t))["gram"]})


def cmd_herm_codiag(args):
    a, b = load_hermitian(args.a), load_hermitian(args.b)
    flat = codiagonalize(a, b)
    _emit(
        args,
        {
            "basis": flat.basis.to_json(),
            "mu": [_float_str(x) for x in flat.mu],
            "mu_prime": [_float_str(x) for x in flat.mu_prime],
        },
    )


def cmd_herm_convexity(args):
    norms = [load_hermitian(p) for p in (args.a, args.b, args.c, args.d)]
    gap = convexity_gap(parse_norm(args.norm), norms[:2], norms[2:], args.grid)
    _emit_scalar(args, gap, "gap")
    if gap > args.tol:
        raise CliError(f"convexity gap {gap:.3g} exceeds --tol {args.tol:g}", 1)


# non-Archimedean side


def cmd_na_dist(args):
    a, b = load_na(args.a), load_na(args.b)
    _emit_scalar(args, na_distance(parse_norm(args.norm), a, b), "distance")


def cmd_na_codiag(args):
    a, b = load_na(args.a), load_na(args.b)
    ap = na_codiagonalize(a, b)
    _emit(args, {"basis": ap.basis.to_json(), "mu": [str(x) for x in ap.mu], "mu_prime": [str(x) for x in ap.mu_prime]})


# radial sweep


def cmd_radial_check(args):
    rng = np.random.default_rng(args.seed)
    gauges = [parse_norm(t) for t in args.norms.split(",")]
    rows, worst, failed = [], 0.0, 0
    for k in range(args.pairs):
        if args.parallel_every and k % args.parallel_every == args.parallel_every - 1:
            r1, r2 = sampling.random_parallel_pair(rng, args.n)
        else:
            r1, r2 = sampling.random_ray(rng, args.n), sampling.random_ray(rng, args.n)
        for tau in gauges:
            res = isometry_check(tau, r1, r2, args.horizon)
            ok = res.passed(args.floor)
            failed += not ok
            worst = max(worst, res.defect)
            rows.append(
                {
                    "pair": k,
                    "norm": str(tau),
                    "estimate": _float_str(res.estimate),
                    "na_distance": _float_str(res.na_value),
                    "defect": _float_str(res.defect),
                    "error_bound": _float_str(res.error_bound),
                    "passed": ok,
                }
            )
    if args.format == "csv":
        head = ["pair", "norm", "estimate", "na_distance", "defect", "error_bound", "passed"]
        lines = [",".join(head)] + [",".join(str(r[h]) for h in head) for r in rows]
        _emit(args, "\n".join(lines))
    else:
        _emit(args, {"n": args.n, "horizon": _float_str(args.horizon), "max_defect": _float_str(worst), "failed": failed, "rows": rows})
    if failed:
        raise CliError(f"{failed} checks exceed max(floor, errorBound)", 1)


# curve side


def _valuation(args) -> Valuation:
    if args.point is None:
        return TRIVIAL
    if args.c is None:
        raise InputError("<argv>", None, "--c", "required with --point")
    return Valuation(ClosedPoint(args.point), to_fraction(args.c))


def cmd_curve_eval(args):
    phi, pol, _ = load_potential(args.file)
    _emit_scalar(args, potential_eval(phi, _valuation(args)))


def cmd_curve_profile(args):
    phi, pol, _ = load_potential(args.file)
    if args.format == "dot":
        _emit(args, potential_to_dot(phi, Path(args.file).stem))
    else:
        _emit(args, {**phi.to_json(), "V": pol.V, "genus": pol.genus})


def cmd_curve_ma(args):
    phi, pol, _ = load_potential(args.file)
    _emit(args, {**monge_ampere(phi, pol).to_json(), "V": pol.V, "genus": pol.genus})


def cmd_curve_energy(args):
    phi, pol, _ = load_potential(args.file)
    _emit_scalar(args, energy(phi, pol), "energy")


def _measure_or_potential(path):
    data, text = read_json(path)
    if "atoms" in data:
        mu, pol = parse_measure(data, str(path), text)
        return mu, pol
    phi, pol, _ = load_potential(path)
    return monge_ampere(phi, pol), pol


def cmd_curve_entropy(args):
    mu, _ = _measure_or_potential(args.file)
    _emit_scalar(args, entropy(mu), "entropy")


def cmd_curve_mabuchi(args):
    phi, pol, _ = load_potential(args.file)
    _emit_scalar(args, mabuchi(phi, pol), "mabuchi")


def _load_measure(path):
    data, text = read_json(path)
    return parse_measure(data, str(path), text)


def cmd_curve_solve_ma(args):
    mu, pol = _load_measure(args.file)
    phi = solve_ma(mu, pol)
    if args.format == "dot":
        _emit(args, potential_to_dot(phi, Path(args.file).stem))
    else:
        _emit(args, {**phi.to_json(), "V": pol.V, "genus": pol.genus})


def cmd_curve_dual_energy(args):
    mu, pol = _load_measure(args.file)
    _emit_scalar(args, dual_energy(mu, pol), "dual_energy")


def cmd_curve_d1(args):
    phi, pol, _ = load_potential(args.a)
    psi, pol2, _ = load_potential(args.b)
    if pol != pol2:
        raise InputError(args.b, None, "V", f"polarization {pol2} differs from {pol}")
    _emit_scalar(args, d1(phi, psi, pol), "d1")


def cmd_curve_report(args):
    items, names, pol = [], [], None
    for path in args.files:
        data, text = read_json(path)
        fs, p = parse_fsdata(data, str(path), text)
        if pol is not None and p != pol:
            raise InputError(str(path), None, "V", f"polarization {p} differs from {pol}")
        pol = p
        items.append(fs)
        names.append(Path(path).stem)
    rep = stability_report(items, pol, names)
    if args.format == "json":
        _emit(args, report_to_json(rep))
    else:
        _emit(args, report_to_csv(rep))
        if not args.out:
            sys.stderr.write("verdict: " + rep.verdict + "\n")


def cmd_selftest(args):
    wanted = sorted(CRITERIA) if not args.criteria else sorted({int(x) for x in args.criteria.split(",")})
    for k in wanted:
        if k not in CRITERIA:
            raise InputError("<argv>", None, "--criteria", f"no criterion {k}")
    results = [run_criterion(k, args.seed) for k in wanted]
    _emit(args, "\n".join(r.line() for r in results))
    if not all(r.passed for r in results):
        raise CliError("some acceptance criteria failed", 1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("--tol", type=float, default=1e-8, help="metric tolerance (default 1e-8)")
    g.add_argument("--horizon", type=float, default=1e6, help="ray horizon T (default 1e6)")
    g.add_argument("--out", help="write results to this path")
    g.add_argument("--format", choices=("json", "csv", "dot"), help="output format")

    parser = argparse.ArgumentParser(prog="berkstab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    herm = top.add_parser("herm", help="Hermitian norms").add_subparsers(dest="cmd", required=True)
    p = leaf(herm, "dist", cmd_herm_dist, "Finsler distance d_tau")
    p.add_argument("a"), p.add_argument("b"), p.add_argument("--norm", default="l2")
    p = leaf(herm, "geodesic", cmd_herm_geodesic, "point on the distinguished geodesic")
    p.add_argument("a"), p.add_argument("b"), p.add_argument("--t", type=float, required=True)
    p = leaf(herm, "codiag", cmd_herm_codiag, "common flat of two norms")
    p.add_argument("a"), p.add_argument("b")
    p = leaf(herm, "convexity", cmd_herm_convexity, "convexity gap of two geodesics a-b and c-d")
    for name in "abcd":
        p.add_argument(name)
    p.add_argument("--norm", default="l2"), p.add_argument("--grid", type=int, default=33)

    na = top.add_parser("na", help="non-Archimedean norms").add_subparsers(dest="cmd", required=True)
    p = leaf(na, "dist", cmd_na_dist, "distance d_tau,na")
    p.add_argument("a"), p.add_argument("b"), p.add_argument("--norm", default="l1")
    p = leaf(na, "codiag", cmd_na_codiag, "common apartment of two norms")
    p.add_argument("a"), p.add_argument("b")

    radial = top.add_parser("radial", help="geodesic rays").add_subparsers(dest="cmd", required=True)
    p = leaf(radial, "check", cmd_radial_check, "isometry sweep over random ray pairs")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--norms", default="l1,l2,linf")
    p.add_argument("--floor", type=float, default=1e-5, help="defect floor (default 1e-5)")
    p.add_argument("--parallel-every", type=int, default=4, help="every k-th pair shares its limit (0: never)")

    curve = top.add_parser("curve", help="Berkovich projective line").add_subparsers(dest="cmd", required=True)
    p = leaf(curve, "eval", cmd_curve_eval, "potential at a valuation (trivial unless --point)")
    p.add_argument("file"), p.add_argument("--point"), p.add_argument("--c")
    p = leaf(curve, "profile", cmd_curve_profile, "PL potential of an FS data file")
    p.add_argument("file")
    for name, fn, help_ in (
        ("ma", cmd_curve_ma, "Monge-Ampere measure"),
        ("energy", cmd_curve_energy, "Monge-Ampere energy"),
        ("entropy", cmd_curve_entropy, "entropy of a measure, or of MA of a potential"),
        ("mabuchi", cmd_curve_mabuchi, "Mabuchi functional"),
        ("solve-ma", cmd_curve_solve_ma, "potential with a given Monge-Ampere measure"),
        ("dual-energy", cmd_curve_dual_energy, "dual energy of a measure"),
    ):
        leaf(curve, name, fn, help_).add_argument("file")
    p = leaf(curve, "d1", cmd_curve_d1, "d1 distance")
    p.add_argument("a"), p.add_argument("b")
    p = leaf(curve, "report", cmd_curve_report, "stability report over FS data files")
    p.add_argument("files", nargs="+")

    p = leaf(top, "selftest", cmd_selftest, "run the acceptance criteria")
    p.add_argument("--criteria", help="comma-separated subset, e.g. 1,4,7")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not math.isfinite(args.horizon) or args.horizon <= 0:
        sys.stderr.write("berkstab: error: --horizon must be positive and finite\n")
        return 2
    try:
        args.func(args)
    except CliError as exc:
        sys.stderr.write(f"berkstab: {exc}\n")
        return exc.code
    except InfeasibleMeasureError as exc:
        sys.stderr.write(f"berkstab: infeasible: {exc}\n")
        return 1
    except (InputError, PshError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"berkstab: invalid input: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

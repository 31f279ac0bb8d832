"""File formats for curve data: FS data, potentials, measures, reports."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

from .measure import DivisorialMeasure, InfeasibleMeasureError
from .points import Polarization, to_fraction
from .potential import FSData, PLPotential, PshError, SectionDivisor, fs_profile, parse_linear_forms
from .stability import StabilityReport

__all__ = [
    "InputError",
    "read_json",
    "parse_fsdata",
    "parse_potential",
    "parse_measure",
    "load_potential",
    "potential_to_dot",
    "report_to_json",
    "report_to_csv",
    "fraction_str",
]


class InputError(ValueError):
    """Malformed input, with the file, line and field at fault."""

    def __init__(self, source: str, line: int | None, fieldname: str, message: str):
        self.source, self.line, self.fieldname = source, line, fieldname
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: field '{fieldname}': {message}")


def fraction_str(x: Fraction) -> str:
    return str(Fraction(x))


def read_json(path) -> tuple[dict, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(str(path), None, "<file>", exc.strerror or str(exc)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(str(path), exc.lineno, "<json>", exc.msg) from None
    if not isinstance(data, dict):
        raise InputError(str(path), 1, "<root>", "expected a JSON object")
    return data, text


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    idx = text.find(f'"{key}"')
    return None if idx < 0 else text.count("\n", 0, idx) + 1


class _Ctx:
    def __init__(self, source: str, text: str | None):
        self.source, self.text = source, text

    def fail(self, fieldname: str, message: str):
        key = fieldname.split(".")[-1].split("[")[0]
        raise InputError(self.source, _line_of(self.text, key), fieldname, message)


def _polarization(data: dict, ctx: _Ctx) -> Polarization:
    try:
        return Polarization(int(data.get("V", 1)), int(data.get("genus", 0)))
    except (TypeError, ValueError) as exc:
        ctx.fail("V" if "V" in str(exc) else "genus", str(exc))


def _integer(x, ctx: _Ctx, fieldname: str) -> int:
    try:
        f = to_fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        ctx.fail(fieldname, str(exc))
    if f.denominator != 1:
        ctx.fail(fieldname, f"expected an integer, got {x!r}")
    return int(f)


def parse_fsdata(data: dict, source: str = "<input>", text: str | None = None) -> tuple[FSData, Polarization]:
    ctx = _Ctx(source, text)
    pol = _polarization(data, ctx)
    if "m" not in data:
        ctx.fail("m", "missing")
    m = _integer(data["m"], ctx, "m")
    secs = data.get("sections")
    if not isinstance(secs, list) or not secs:
        ctx.fail("sections", "expected a nonempty list")
    entries = []
    for i, sec in enumerate(secs):
        if not isinstance(sec, dict):
            ctx.fail(f"sections[{i}]", "expected an object")
        if "lambda" not in sec:
            ctx.fail(f"sections[{i}].lambda", "missing")
        lam = _integer(sec["lambda"], ctx, f"sections[{i}].lambda")
        try:
            if "zeros" in sec:
                if not isinstance(sec["zeros"], dict):
                    ctx.fail(f"sections[{i}].zeros", "expected an object")
                zeros = sec["zeros"]
            elif "form" in sec:
                zeros = parse_linear_forms(str(sec["form"]))
            else:
                ctx.fail(f"sections[{i}].zeros", "missing (or give 'form')")
            entries.append((SectionDivisor(zeros, m), lam))
        except InputError:
            raise
        except (ValueError, ZeroDivisionError) as exc:
            ctx.fail(f"sections[{i}].zeros", str(exc))
    try:
        fs = FSData(m, entries)
        fs.check_degrees(pol)
    except ValueError as exc:
        ctx.fail("sections", str(exc))
    return fs, pol


def parse_potential(data: dict, source: str = "<input>", text: str | None = None) -> tuple[PLPotential, Polarization]:
    ctx = _Ctx(source, text)
    pol = _polarization(data, ctx)
    try:
        phi = PLPotential.from_json(data)
    except KeyError as exc:
        ctx.fail(str(exc.args[0]), "missing")
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        ctx.fail("branches", str(exc))
    if not phi.is_psh(pol):
        ctx.fail("branches", f"initial slopes sum to {phi.initial_slope_sum()} < -{pol.V}")
    return phi, pol


def parse_measure(data: dict, source: str = "<input>", text: str | None = None) -> tuple[DivisorialMeasure, Polarization]:
    """Measure file; a missing trivial atom receives the remaining mass."""
    ctx = _Ctx(source, text)
    pol = _polarization(data, ctx)
    if not isinstance(data.get("atoms"), list):
        ctx.fail("atoms", "expected a list")
    for i, a in enumerate(data["atoms"]):
        if not isinstance(a, dict) or "mass" not in a:
            ctx.fail(f"atoms[{i}].mass", "missing")
        if not a.get("trivial") and ("point" not in a or "c" not in a):
            ctx.fail(f"atoms[{i}].point", "branch atoms need 'point' and 'c'")
    try:
        return DivisorialMeasure.from_json(data), pol
    except InfeasibleMeasureError:
        raise
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        ctx.fail("atoms", str(exc))


def load_potential(path) -> tuple[PLPotential, Polarization, FSData | None]:
    """A potential from either an FS data file or a potential file."""
    data, text = read_json(path)
    if "sections" in data:
        fs, pol = parse_fsdata(data, str(path), text)
        return fs_profile(fs, pol), pol, fs
    if "root" in data:
        phi, pol = parse_potential(data, str(path), text)
        return phi, pol, None
    raise InputError(str(path), 1, "<root>", "expected 'sections' (FS data) or 'root' (potential)")


def potential_to_dot(phi: PLPotential, name: str = "phi") -> str:
    lines = [f'digraph "{name}" {{', f'  triv [label="triv\\nphi={phi.root}"];']
    for i, (p, prof) in enumerate(phi.branches):
        prev = "triv"
        for k, ((c, jump), value) in enumerate(zip(prof.jumps(), prof.values()[1:])):
            node = f"b{i}_{k}"
            lines.append(f'  {node} [label="{c}*ord_{p}\\nphi={phi.root + value}\\njump={jump}"];')
            lines.append(f'  {prev} -> {node} [label="slope {prof.slopes[k]}"];')
            prev = node
        lines.append(f'  b{i}_end [shape=point, label=""];')
        lines.append(f'  {prev} -> b{i}_end [label="slope 0"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _ratio_str(r) -> str:
    return "inf" if r is None else fraction_str(r)


def report_to_json(report: StabilityReport) -> dict:
    return {
        "V": report.pol.V,
        "genus": report.pol.genus,
        "rows": [
            {
                "name": r.name,
                "E": fraction_str(r.E),
                "R": fraction_str(r.R),
                "H": fraction_str(r.H),
                "M": fraction_str(r.M),
                "d1": fraction_str(r.dist),
                "ratio": _ratio_str(r.ratio),
                "verdict": r.verdict,
            }
            for r in report.rows
        ],
        "sigma": _ratio_str(report.sigma),
        "verdicts": list(report.verdicts),
    }


def report_to_csv(report: StabilityReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "E", "R", "H", "M", "d1", "ratio", "verdict"])
    for r in report.rows:
        w.writerow([r.name, r.E, r.R, r.H, r.M, r.dist, _ratio_str(r.ratio), r.verdict])
    return buf.getvalue()

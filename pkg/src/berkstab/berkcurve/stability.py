"""Stability reports over families of Fubini-Study potentials."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .envelope import dist_to_constants
from .functionals import energy, entropy, mabuchi, mean_scalar, ricci_energy
from .measure import monge_ampere
from .points import Polarization
from .potential import FSData, PLPotential, fs_profile

__all__ = ["ReportRow", "StabilityReport", "stability_report", "UNIFORM_FAILS", "NOT_SEMISTABLE", "NO_WITNESS", "ALL_CONSTANT"]

NOT_SEMISTABLE = "not K̂-semistable"
UNIFORM_FAILS = "uniform K̂-stability fails"
NO_WITNESS = "no destabilizing direction found"
ALL_CONSTANT = "all rows constant"


@dataclass(frozen=True)
class ReportRow:
    name: str
    potential: PLPotential
    E: Fraction
    R: Fraction
    H: Fraction
    M: Fraction
    dist: Fraction
    constant: bool

    @property
    def ratio(self) -> Fraction | None:
        """``M / dist``, or None (infinite) for constants."""
        return None if self.constant else self.M / self.dist

    @property
    def verdict(self) -> str:
        if self.M < 0:
            return "destabilizing"
        if self.constant:
            return "constant"
        return "product-type" if self.M == 0 else "positive"


@dataclass(frozen=True)
class StabilityReport:
    rows: tuple[ReportRow, ...]
    pol: Polarization
    verdicts: tuple[str, ...] = field(default=())

    @property
    def sigma(self) -> Fraction | None:
        """Smallest ``M / dist`` over non-constant rows."""
        ratios = [r.ratio for r in self.rows if not r.constant]
        return min(ratios) if ratios else None

    @property
    def model_level(self) -> bool:
        return self.pol.genus > 0

    @property
    def verdict(self) -> str:
        return "; ".join(self.verdicts)


def _verdicts(rows: Sequence[ReportRow], pol: Polarization) -> tuple[str, ...]:
    out = []
    if any(r.M < 0 for r in rows):
        out.append(NOT_SEMISTABLE)
    if any(r.M == 0 and not r.constant for r in rows):
        out.append(UNIFORM_FAILS)
    if not out:
        out.append(ALL_CONSTANT if all(r.constant for r in rows) else NO_WITNESS)
    if pol.genus > 0:
        out.append("model-level (genus > 0)")
    return tuple(out)


def report_row(name: str, phi: PLPotential, pol: Polarization) -> ReportRow:
    mu = monge_ampere(phi, pol)
    E, R, H = energy(phi, pol), ricci_energy(phi, pol), entropy(mu)
    M = mabuchi(phi, pol)
    if M != mean_scalar(pol) * E + R + H:
        raise ArithmeticError("Chen-Tian decomposition does not close")
    dist = dist_to_constants(phi, pol).value
    return ReportRow(name, phi, E, R, H, M, dist, phi.is_constant)


def stability_report(potentials: Sequence, pol: Polarization, names: Sequence[str] | None = None) -> StabilityReport:
    """Rows for FSData (or ready PL potentials) plus an aggregate verdict."""
    if not potentials:
        raise ValueError("need at least one potential")
    names = list(names) if names is not None else [f"phi{i}" for i in range(len(potentials))]
    rows = []
    for name, item in zip(names, potentials):
        phi = fs_profile(item, pol) if isinstance(item, FSData) else item
        rows.append(report_row(name, phi, pol))
    return StabilityReport(tuple(rows), pol, _verdicts(rows, pol))

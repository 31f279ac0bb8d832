"""Divisorial probability measures, the Monge-Ampere operator and its inverse."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .points import TRIVIAL, ClosedPoint, Polarization, Valuation, to_fraction
from .potential import PLPotential, Profile, PshError

__all__ = ["DivisorialMeasure", "InfeasibleMeasureError", "monge_ampere", "solve_ma", "dirac"]

ZERO = Fraction(0)


class InfeasibleMeasureError(ValueError):
    """Branch masses exceed 1, so no potential has this measure."""


@dataclass(frozen=True)
class DivisorialMeasure:
    """Finitely many atoms ``(valuation, mass)`` with positive masses summing to 1."""

    atoms: tuple[tuple[Valuation, Fraction], ...]

    def __init__(self, atoms: Iterable, *, fill_trivial: bool = False):
        table: dict[Valuation, Fraction] = {}
        for v, w in atoms:
            if not isinstance(v, Valuation):
                raise TypeError("atoms are (Valuation, mass) pairs")
            w = to_fraction(w)
            if w < 0:
                raise ValueError(f"negative mass {w} at {v}")
            if v in table:
                raise ValueError(f"repeated atom {v}")
            table[v] = w
        total = sum(table.values(), ZERO)
        branch_total = total - table.get(TRIVIAL, ZERO)
        if branch_total > 1:
            raise InfeasibleMeasureError(f"branch masses sum to {branch_total} > 1")
        if fill_trivial and TRIVIAL not in table:
            table[TRIVIAL] = 1 - total
        elif total != 1:
            raise ValueError(f"masses sum to {total}, not 1")
        items = [(v, w) for v, w in table.items() if w != 0]
        object.__setattr__(self, "atoms", tuple(sorted(items, key=lambda a: a[0].sort_key())))

    def mass(self, v: Valuation) -> Fraction:
        return dict(self.atoms).get(v, ZERO)

    @property
    def trivial_mass(self) -> Fraction:
        return self.mass(TRIVIAL)

    def branch_atoms(self) -> dict[ClosedPoint, list[tuple[Fraction, Fraction]]]:
        """Per branch, the ``(c, mass)`` pairs sorted by ``c``."""
        out: dict[ClosedPoint, list] = defaultdict(list)
        for v, w in self.atoms:
            if not v.is_trivial:
                out[v.point].append((v.c, w))
        return {p: sorted(a) for p, a in sorted(out.items())}

    def to_json(self) -> dict:
        rows = []
        for v, w in self.atoms:
            if v.is_trivial:
                rows.append({"trivial": True, "mass": str(w)})
            else:
                rows.append({"point": str(v.point), "c": str(v.c), "mass": str(w)})
        return {"atoms": rows}

    @classmethod
    def from_json(cls, data: dict) -> "DivisorialMeasure":
        atoms = []
        for a in data["atoms"]:
            v = TRIVIAL if a.get("trivial") else Valuation(ClosedPoint(a["point"]), to_fraction(a["c"]))
            atoms.append((v, to_fraction(a["mass"])))
        return cls(atoms, fill_trivial=True)

    def __str__(self):
        return " + ".join(f"{w}*delta[{v}]" for v, w in self.atoms)


def dirac(v: Valuation) -> DivisorialMeasure:
    return DivisorialMeasure([(v, 1)])


def monge_ampere(phi: PLPotential, pol: Polarization) -> DivisorialMeasure:
    """``delta_triv + V^{-1} * (tree Laplacian of phi)``.

    Each slope increase ``j`` at a break ``c`` of branch ``xi`` gives mass
    ``j/V`` at ``c*ord_xi``; the root keeps ``1 + V^{-1} sum_xi u_xi'(0)``.
    """
    V = Fraction(pol.V)
    root_mass = 1 + phi.initial_slope_sum() / V
    if root_mass < 0:
        raise PshError(f"root condition fails: mass {root_mass} at the trivial valuation")
    atoms = [(TRIVIAL, root_mass)]
    for p, prof in phi.branches:
        atoms.extend((Valuation(p, c), j / V) for c, j in prof.jumps())
    return DivisorialMeasure(atoms)


def solve_ma(mu: DivisorialMeasure, pol: Polarization) -> PLPotential:
    """The potential with root value 0 whose Monge-Ampere measure is ``mu``.

    On each branch the slope just before the atom at ``c_k`` is ``-V`` times
    the branch mass at or beyond ``c_k``.
    """
    V = Fraction(pol.V)
    branch_total = sum((w for v, w in mu.atoms if not v.is_trivial), ZERO)
    if branch_total > 1:
        raise InfeasibleMeasureError(f"branch masses sum to {branch_total} > 1")
    branches = []
    for p, atoms in mu.branch_atoms().items():
        remaining = sum((w for _, w in atoms), ZERO)
        slopes = []
        for _, w in atoms:
            slopes.append(-V * remaining)
            remaining -= w
        branches.append((p, Profile(tuple(c for c, _ in atoms), tuple(slopes) + (ZERO,))))
    return PLPotential(ZERO, branches)

"""Piecewise-linear psh potentials on the Berkovich projective line.

The tree has one root (the trivial valuation) and one branch ``[0, inf)``
per closed point. A potential is a root value ``r`` together with, for
finitely many branches, a *profile* ``u`` with ``u(0) = 0``: convex,
non-increasing, piecewise linear with rational breaks, eventually constant.
On branch ``xi`` the potential is ``r + u_xi(c)``; unlisted branches carry
the constant ``r``.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .points import ClosedPoint, Polarization, Valuation, to_fraction

__all__ = [
    "Profile",
    "PLPotential",
    "PshError",
    "SectionDivisor",
    "FSData",
    "parse_linear_forms",
    "fs_profile",
    "potential_eval",
    "combine",
]

ZERO = Fraction(0)


class PshError(ValueError):
    """A potential violates the curve-level psh conditions."""


@dataclass(frozen=True)
class Profile:
    """Convex non-increasing PL function on ``[0, inf)`` with ``u(0) = 0``.

    ``slopes[k]`` is the slope on ``(breaks[k-1], breaks[k])``, with
    ``breaks[-1] = 0`` and ``breaks[K] = inf``; the last slope is 0.
    """

    breaks: tuple[Fraction, ...] = ()
    slopes: tuple[Fraction, ...] = (ZERO,)

    def __post_init__(self):
        breaks = tuple(to_fraction(b) for b in self.breaks)
        slopes = tuple(to_fraction(s) for s in self.slopes)
        if len(slopes) != len(breaks) + 1:
            raise PshError("a profile needs one more slope than breaks")
        if any(b <= 0 for b in breaks) or any(a >= b for a, b in zip(breaks, breaks[1:])):
            raise PshError("breaks must be positive and strictly increasing")
        if slopes[-1] != 0:
            raise PshError("the last slope must be 0 (eventually constant)")
        if any(a > b for a, b in zip(slopes, slopes[1:])):
            raise PshError("slopes must increase (convexity)")
        # drop breaks without a slope change
        keep = [k for k in range(len(breaks)) if slopes[k] != slopes[k + 1]]
        object.__setattr__(self, "breaks", tuple(breaks[k] for k in keep))
        object.__setattr__(self, "slopes", tuple(slopes[k] for k in keep) + (ZERO,))

    @classmethod
    def from_vertices(cls, points: Sequence[tuple]) -> "Profile":
        """Profile through ``(0, 0), (x_1, y_1), ...``, constant after the last point."""
        pts = [(to_fraction(x), to_fraction(y)) for x, y in points]
        if not pts or pts[0] != (0, 0):
            raise PshError("vertices must start at (0, 0)")
        breaks, slopes = [], []
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x1 <= x0:
                raise PshError("vertex abscissae must increase")
            slopes.append((y1 - y0) / (x1 - x0))
            breaks.append(x1)
        return cls(tuple(breaks), tuple(slopes) + (ZERO,))

    @property
    def is_constant(self) -> bool:
        return not self.breaks

    @property
    def initial_slope(self) -> Fraction:
        return self.slopes[0]

    def values(self) -> list[Fraction]:
        """``u`` at ``0`` and at every break."""
        out, x, y = [ZERO], ZERO, ZERO
        for b, s in zip(self.breaks, self.slopes):
            y += s * (b - x)
            x = b
            out.append(y)
        return out

    def vertices(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip((ZERO,) + self.breaks, self.values()))

    @property
    def limit(self) -> Fraction:
        return self.values()[-1]

    def __call__(self, c) -> Fraction:
        c = to_fraction(c)
        if c < 0:
            raise ValueError("branch parameter must be >= 0")
        k = bisect_right(self.breaks, c)
        xs, ys = (ZERO,) + self.breaks, self.values()
        return ys[k] + self.slopes[k] * (c - xs[k])

    def jumps(self) -> list[tuple[Fraction, Fraction]]:
        """``(break, slope increase)`` pairs; all increases are positive."""
        return [(b, self.slopes[k + 1] - self.slopes[k]) for k, b in enumerate(self.breaks)]

    def dirichlet(self) -> Fraction:
        """``int_0^inf u'(c)^2 dc``."""
        xs = (ZERO,) + self.breaks
        return sum((s * s * (xs[k + 1] - xs[k]) for k, s in enumerate(self.slopes[:-1])), ZERO)

    def rescaled(self, a: Fraction) -> "Profile":
        """``c -> a * u(c / a)``."""
        return Profile(tuple(a * b for b in self.breaks), self.slopes)

    def to_json(self) -> dict:
        return {"breaks": [str(b) for b in self.breaks], "slopes": [str(s) for s in self.slopes]}

    @classmethod
    def from_json(cls, data: dict) -> "Profile":
        return cls(tuple(to_fraction(b) for b in data.get("breaks", [])), tuple(to_fraction(s) for s in data.get("slopes", ["0"])))


def _profile_combination(terms: Sequence[tuple[Fraction, Profile]]) -> Profile:
    breaks = sorted({b for _, p in terms for b in p.breaks})
    slopes = []
    for k in range(len(breaks) + 1):
        left = ZERO if k == 0 else breaks[k - 1]
        total = ZERO
        for coef, p in terms:
            total += coef * p.slopes[bisect_right(p.breaks, left)]
        slopes.append(total)
    return Profile(tuple(breaks), tuple(slopes))


@dataclass(frozen=True)
class PLPotential:
    """Root value plus branch profiles; constant profiles are dropped."""

    root: Fraction
    branches: tuple[tuple[ClosedPoint, Profile], ...] = ()

    def __init__(self, root, branches: Mapping | Iterable = ()):
        items = branches.items() if isinstance(branches, Mapping) else branches
        table: dict[ClosedPoint, Profile] = {}
        for p, prof in items:
            p = ClosedPoint(p)
            if p in table:
                raise ValueError(f"duplicate branch {p}")
            if not isinstance(prof, Profile):
                raise TypeError("branch profiles must be Profile instances")
            if not prof.is_constant:
                table[p] = prof
        object.__setattr__(self, "root", to_fraction(root))
        object.__setattr__(self, "branches", tuple(sorted(table.items())))

    @classmethod
    def constant(cls, c) -> "PLPotential":
        return cls(c)

    @property
    def is_constant(self) -> bool:
        return not self.branches

    def profile(self, point) -> Profile:
        p = ClosedPoint(point)
        for q, prof in self.branches:
            if q == p:
                return prof
        return Profile()

    @property
    def points(self) -> list[ClosedPoint]:
        return [p for p, _ in self.branches]

    def initial_slope_sum(self) -> Fraction:
        return sum((prof.initial_slope for _, prof in self.branches), ZERO)

    def is_psh(self, pol: Polarization) -> bool:
        return self.initial_slope_sum() >= -pol.V

    def check(self, pol: Polarization) -> "PLPotential":
        if not self.is_psh(pol):
            raise PshError(f"root condition fails: initial slopes sum to {self.initial_slope_sum()} < -{pol.V}")
        return self

    def __call__(self, v: Valuation) -> Fraction:
        if v.is_trivial:
            return self.root
        return self.root + self.profile(v.point)(v.c)

    @property
    def infimum(self) -> Fraction:
        """Smallest value on the tree (attained far out on some branch)."""
        return self.root + min((prof.limit for _, prof in self.branches), default=ZERO)

    def plus(self, c) -> "PLPotential":
        return PLPotential(self.root + to_fraction(c), self.branches)

    def rescaled(self, a) -> "PLPotential":
        """Image under the scaling action: ``v -> a * phi(v / a)``."""
        a = to_fraction(a)
        if a <= 0:
            raise ValueError("scaling factor must be positive")
        return PLPotential(a * self.root, [(p, prof.rescaled(a)) for p, prof in self.branches])

    def to_json(self) -> dict:
        return {"root": str(self.root), "branches": {str(p): prof.to_json() for p, prof in self.branches}}

    @classmethod
    def from_json(cls, data: dict) -> "PLPotential":
        return cls(to_fraction(data["root"]), [(ClosedPoint(k), Profile.from_json(v)) for k, v in data.get("branches", {}).items()])


def potential_eval(phi: PLPotential, v: Valuation) -> Fraction:
    return phi(v)


def combine(terms: Sequence[tuple]) -> PLPotential:
    """``sum_i a_i * phi_i`` for nonnegative rational ``a_i``."""
    terms = [(to_fraction(a), phi) for a, phi in terms]
    if any(a < 0 for a, _ in terms):
        raise ValueError("coefficients must be nonnegative to stay in the psh class")
    points = sorted({p for _, phi in terms for p in phi.points})
    root = sum((a * phi.root for a, phi in terms), ZERO)
    branches = [(p, _profile_combination([(a, phi.profile(p)) for a, phi in terms])) for p in points]
    return PLPotential(root, branches)


@dataclass(frozen=True)
class SectionDivisor:
    """Zero divisor of a section of ``mL``: closed point -> multiplicity."""

    zeros: tuple[tuple[ClosedPoint, int], ...]
    level: int

    def __init__(self, zeros: Mapping | Iterable, level: int):
        items = zeros.items() if isinstance(zeros, Mapping) else zeros
        table: dict[ClosedPoint, int] = {}
        for p, k in items:
            p = ClosedPoint(p)
            if isinstance(k, bool) or int(k) != k or k < 0:
                raise ValueError(f"multiplicity at {p} must be a nonnegative integer, got {k!r}")
            if int(k):
                table[p] = table.get(p, 0) + int(k)
        if isinstance(level, bool) or int(level) != level or level < 1:
            raise ValueError(f"level must be a positive integer, got {level!r}")
        object.__setattr__(self, "zeros", tuple(sorted(table.items())))
        object.__setattr__(self, "level", int(level))

    def multiplicity(self, point) -> int:
        p = ClosedPoint(point)
        return dict(self.zeros).get(p, 0)

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.zeros)

    @property
    def support(self) -> set:
        return {p for p, _ in self.zeros}


@dataclass(frozen=True)
class FSData:
    """Weighted sections ``(s_j, lambda_j)`` of ``mL`` without common zeros."""

    m: int
    entries: tuple[tuple[SectionDivisor, int], ...]

    def __init__(self, m: int, entries: Iterable):
        entries = tuple((s, int(lam)) for s, lam in entries)
        if isinstance(m, bool) or int(m) != m or m < 1:
            raise ValueError(f"m must be a positive integer, got {m!r}")
        if not entries:
            raise ValueError("need at least one section")
        for s, lam in entries:
            if s.level != m:
                raise ValueError(f"section at level {s.level} in data of level {m}")
        common = set.intersection(*(s.support for s, _ in entries))
        if common:
            raise ValueError("sections have common zeros at " + ", ".join(sorted(str(p) for p in common)))
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "entries", entries)

    def check_degrees(self, pol: Polarization) -> None:
        for s, _ in self.entries:
            if s.degree != self.m * pol.V:
                raise ValueError(f"section degree {s.degree} differs from m*V = {self.m * pol.V}")


_FACTOR = re.compile(r"\s*(?:\(([^()]*)\)|([xy]))\s*(?:\^\s*(\d+))?\s*\*?")
_TERM = re.compile(r"\s*([+-]?)\s*([0-9/]*)\s*\*?\s*([xy])\s*")


def _linear_zero(text: str) -> ClosedPoint:
    coef = {"x": ZERO, "y": ZERO}
    pos = 0
    s = text.strip()
    if not s:
        raise ValueError("empty linear form")
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse linear form {text!r}")
        sign, num, var = m.groups()
        c = Fraction(num) if num else Fraction(1)
        coef[var] += -c if sign == "-" else c
        pos = m.end()
    a, b = coef["x"], coef["y"]
    if a == 0 and b == 0:
        raise ValueError(f"zero linear form {text!r}")
    # a x + b y = 0 at x/y = -b/a
    return ClosedPoint("inf") if a == 0 else ClosedPoint(str(-b / a))


def parse_linear_forms(text: str) -> dict[ClosedPoint, int]:
    """Zero divisor of a product of binary linear forms, e.g. ``"x^2*(x-2y)"``."""
    zeros: dict[ClosedPoint, int] = {}
    pos, s = 0, text.strip()
    if s in ("1", ""):
        return zeros
    while pos < len(s):
        m = _FACTOR.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse section {text!r} at position {pos}")
        inner, var, power = m.groups()
        form = inner if inner is not None else var
        p = _linear_zero(form)
        zeros[p] = zeros.get(p, 0) + (int(power) if power else 1)
        pos = m.end()
    return zeros


def _branch_envelope(lines: list[tuple[Fraction, Fraction]]) -> Profile:
    """Upper envelope of lines ``(intercept, slope)``, shifted to vanish at 0."""
    top = max(b for b, _ in lines)
    cur = max((ln for ln in lines if ln[0] == top), key=lambda ln: ln[1])
    x = ZERO
    pts = [(ZERO, ZERO)]
    while cur[1] < 0:
        best = None
        for b, s in lines:
            if s <= cur[1]:
                continue
            cross = (cur[0] - b) / (s - cur[1])
            if cross < x:
                continue
            if best is None or cross < best[0] or (cross == best[0] and s > best[1][1]):
                best = (cross, (b, s))
        if best is None:
            raise ValueError("envelope is not eventually constant")
        x, cur = best
        pts.append((x, cur[0] + cur[1] * x - top))
    return Profile.from_vertices(pts)


def fs_profile(data: FSData, pol: Polarization | None = None) -> PLPotential:
    """``phi(v) = (1/m) max_j (lambda_j - v(s_j))`` as a PL potential."""
    if pol is not None:
        data.check_degrees(pol)
    m = Fraction(data.m)
    root = max(Fraction(lam) for _, lam in data.entries) / m
    points = sorted({p for s, _ in data.entries for p in s.support})
    branches = []
    for p in points:
        lines = [(Fraction(lam) / m, -Fraction(s.multiplicity(p)) / m) for s, lam in data.entries]
        branches.append((p, _branch_envelope(lines)))
    return PLPotential(root, branches)

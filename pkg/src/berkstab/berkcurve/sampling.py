"""Random curve data for property sweeps. Deterministic given a ``random.Random``."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .measure import DivisorialMeasure
from .points import TRIVIAL, ClosedPoint, Polarization, Valuation
from .potential import FSData, PLPotential, Profile, SectionDivisor

__all__ = ["POINT_POOL", "random_rational", "random_profile", "random_potential", "random_measure", "random_fsdata"]

POINT_POOL = tuple(ClosedPoint(k) for k in ("0", "inf", "1", "-1", "1/2", "2", "label:E"))


def random_rational(rng: random.Random, lo, hi, max_den: int = 6) -> Fraction:
    den = rng.randint(1, max_den)
    lo_n, hi_n = math.ceil(Fraction(lo) * den), math.floor(Fraction(hi) * den)
    return Fraction(rng.randint(lo_n, hi_n), den)


def random_profile(rng: random.Random, budget: Fraction, max_breaks: int = 3) -> Profile:
    """Profile with total slope jump at most ``budget``."""
    k = rng.randint(1, max_breaks)
    breaks = sorted({random_rational(rng, Fraction(1, 6), 4) for _ in range(k)})
    raw = [Fraction(rng.randint(1, 6)) for _ in breaks]
    scale = budget * random_rational(rng, Fraction(1, 6), 1) / sum(raw)
    jumps = [j * scale for j in raw]
    slopes, s = [], -sum(jumps)
    for j in jumps:
        slopes.append(s)
        s += j
    return Profile(tuple(breaks), tuple(slopes) + (Fraction(0),))


def random_potential(rng: random.Random, pol: Polarization, max_branches: int = 3, max_breaks: int = 3) -> PLPotential:
    """A psh PL potential; the initial slopes use up to all of the budget ``V``."""
    points = rng.sample(POINT_POOL, rng.randint(0, max_branches))
    root = random_rational(rng, -3, 3)
    if not points:
        return PLPotential(root)
    shares = [Fraction(rng.randint(1, 4)) for _ in points]
    total = sum(shares)
    branches = [(p, random_profile(rng, pol.V * w / total, max_breaks)) for p, w in zip(points, shares)]
    return PLPotential(root, branches)


def random_measure(rng: random.Random, max_atoms: int = 5, allow_trivial: bool = True) -> DivisorialMeasure:
    nat = rng.randint(1, max_atoms)
    vals: set[Valuation] = set()
    while len(vals) < nat:
        vals.add(Valuation(rng.choice(POINT_POOL), random_rational(rng, Fraction(1, 6), 4)))
    atoms = sorted(vals, key=Valuation.sort_key)
    if allow_trivial and rng.random() < 0.7:
        atoms.append(TRIVIAL)
    raw = [Fraction(rng.randint(1, 5)) for _ in atoms]
    total = sum(raw)
    return DivisorialMeasure([(v, w / total) for v, w in zip(atoms, raw)])


def _random_divisor(rng: random.Random, points, deg: int, level: int) -> SectionDivisor:
    zeros: dict[ClosedPoint, int] = {}
    for _ in range(deg):
        p = rng.choice(points)
        zeros[p] = zeros.get(p, 0) + 1
    return SectionDivisor(zeros, level)


def random_fsdata(
    rng: random.Random,
    pol: Polarization,
    max_m: int = 4,
    max_sections: int = 6,
    max_weight: int = 5,
    points=POINT_POOL,
) -> FSData:
    """Weighted sections of ``mL`` on P^1 without common zeros.

    Two of the sections are drawn on disjoint sets of points, which rules
    out common zeros without rejection.
    """
    points = list(points)
    if len(points) < 2:
        raise ValueError("need at least two points")
    m = rng.randint(1, max_m)
    deg = m * pol.V
    count = rng.randint(2, max_sections)
    rng.shuffle(points)
    cut = rng.randint(1, len(points) - 1)
    divisors = [_random_divisor(rng, points[:cut], deg, m), _random_divisor(rng, points[cut:], deg, m)]
    divisors += [_random_divisor(rng, points, deg, m) for _ in range(count - 2)]
    rng.shuffle(divisors)
    return FSData(m, [(s, rng.randint(-max_weight, max_weight)) for s in divisors])

"""Psh envelopes and the d1 distance between PL potentials.

Given a root value ``rho``, the largest psh candidate below ``h = min(phi,
psi)`` on a branch is the lower convex hull of ``(0, rho)`` and the graph of
``h``, flat from the first point where ``h`` reaches its limit. The root
condition bounds the sum of the initial hull slopes ``F(rho)`` below by
``-V``. ``F`` is concave, piecewise linear and non-increasing, so the
largest admissible ``rho`` is found exactly by a Newton iteration started
at ``h(0)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .functionals import energy
from .points import ClosedPoint, Polarization
from .potential import PLPotential, Profile

__all__ = ["envelope", "d1", "dist_to_constants", "ConstantDistance"]

ZERO = Fraction(0)
Points = list[tuple[Fraction, Fraction]]


def _graph(phi: PLPotential, p: ClosedPoint) -> Points:
    return [(x, phi.root + y) for x, y in phi.profile(p).vertices()]


def _at(pts: Points, x: Fraction) -> Fraction:
    if x >= pts[-1][0]:
        return pts[-1][1]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise AssertionError("unreachable")


def _pointwise_min(a: Points, b: Points) -> Points:
    xs = sorted({x for x, _ in a} | {x for x, _ in b})
    out: Points = []
    for x, x2 in zip(xs, xs[1:] + [None]):
        fa, fb = _at(a, x), _at(b, x)
        out.append((x, min(fa, fb)))
        if x2 is None:
            break
        ga, gb = _at(a, x2), _at(b, x2)
        if (fa - fb) * (ga - gb) < 0:
            t = (fa - fb) / ((fa - fb) - (ga - gb))
            out.append((x + t * (x2 - x), fa + t * (ga - fa)))
    return out


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _branch_hull(rho: Fraction, h: Points) -> Profile:
    floor = h[-1][1]
    if rho <= floor:
        return Profile()
    hull: Points = []
    for q in [(ZERO, rho)] + [q for q in h if q[0] > 0]:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], q) <= 0:
            hull.pop()
        hull.append(q)
        if q[1] == floor:
            break
    return Profile.from_vertices([(x, y - rho) for x, y in hull])


def _initial_slope(rho: Fraction, h: Points) -> tuple[Fraction, Fraction]:
    """Initial hull slope at ``rho`` and its left derivative in ``rho``."""
    best, deriv = ZERO, ZERO
    for x, y in h:
        if x == 0:
            continue
        s = (y - rho) / x
        if s < best:
            best, deriv = s, -1 / x
        elif s == best and s < 0 and -1 / x > deriv:
            deriv = -1 / x
    return best, deriv


def envelope(phi: PLPotential, psi: PLPotential, pol: Polarization) -> PLPotential:
    """Largest PL psh potential below ``min(phi, psi)``."""
    points = sorted(set(phi.points) | set(psi.points))
    graphs = [_pointwise_min(_graph(phi, p), _graph(psi, p)) for p in points]
    rho = min(phi.root, psi.root)
    bound = -Fraction(pol.V)
    while True:
        parts = [_initial_slope(rho, h) for h in graphs]
        total = sum((s for s, _ in parts), ZERO)
        if total >= bound:
            break
        deriv = sum((d for _, d in parts), ZERO)
        # deriv < 0 here: F is concave, tends to 0 at -inf, and is below -V
        rho += (bound - total) / deriv
    return PLPotential(rho, [(p, _branch_hull(rho, h)) for p, h in zip(points, graphs)])


def d1(phi: PLPotential, psi: PLPotential, pol: Polarization) -> Fraction:
    """``E(phi) + E(psi) - 2 E(P(phi, psi))``."""
    return energy(phi, pol) + energy(psi, pol) - 2 * energy(envelope(phi, psi, pol), pol)


class ConstantDistance(tuple):
    """``(distance, minimizing constant)``."""

    __slots__ = ()

    def __new__(cls, value: Fraction, argmin: Fraction):
        return super().__new__(cls, (value, argmin))

    @property
    def value(self) -> Fraction:
        return self[0]

    @property
    def argmin(self) -> Fraction:
        return self[1]


_MAX_SPLITS = 40


def _interval_min(f, a: Fraction, b: Fraction, fa: Fraction, fb: Fraction, depth: int = 0):
    """Minimum of ``f`` on ``[a, b]``, assuming ``f`` is piecewise quadratic.

    A quadratic through three points is accepted only if it reproduces a
    fourth; otherwise the interval is split.
    """
    mid = (a + b) / 2
    fm = f(mid)
    q = (3 * a + b) / 4
    fq = f(q)
    h = (b - a) / 2
    # quadratic through (a, fa), (mid, fm), (b, fb)
    c2 = (fa - 2 * fm + fb) / (2 * h * h)
    c1 = (fb - fa) / (2 * h)
    model_q = fm + c1 * (q - mid) + c2 * (q - mid) ** 2
    if model_q != fq and depth < _MAX_SPLITS:
        left = _interval_min(f, a, mid, fa, fm, depth + 1)
        right = _interval_min(f, mid, b, fm, fb, depth + 1)
        return min(left, right)
    best = min((fa, a), (fm, mid), (fb, b), (fq, q))
    if c2 > 0:
        vertex = mid - c1 / (2 * c2)
        if a < vertex < b:
            best = min(best, (f(vertex), vertex))
    return best


def dist_to_constants(phi: PLPotential, pol: Polarization) -> ConstantDistance:
    """``inf_c d1(phi, c)`` with a minimizing constant, exactly.

    The minimum lies in ``[inf phi, phi(triv)]``. Candidate breakpoints are
    the values of ``phi`` at its kinks and the intercepts at 0 of its branch
    segments; between them ``c -> d1(phi, c)`` is quadratic.
    """
    lo, hi = phi.infimum, phi.root
    if lo == hi:
        return ConstantDistance(ZERO, hi)
    cuts = {lo, hi}
    for _, prof in phi.branches:
        xs = (ZERO,) + prof.breaks
        for x, y, s in zip(xs, prof.values(), prof.slopes):
            cuts.add(phi.root + y)
            cuts.add(phi.root + y - s * x)
    grid = sorted(c for c in cuts if lo <= c <= hi)
    cache: dict[Fraction, Fraction] = {}

    def dist(c: Fraction) -> Fraction:
        if c not in cache:
            cache[c] = d1(phi, PLPotential.constant(c), pol)
        return cache[c]

    best = min((dist(c), c) for c in grid)
    for a, b in zip(grid, grid[1:]):
        best = min(best, _interval_min(dist, a, b, dist(a), dist(b)))
    return ConstantDistance(*best)

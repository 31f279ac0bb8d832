"""Toric cross-check for monomial data on (P^1, O(d)).

A monomial section ``x^a y^(md - a)`` with weight ``lambda`` gives the point
``(a/m, lambda/m)`` of ``[0, d] x Q``. With ``g`` the upper concave envelope
of these points and ``f = -g``:

    E = (1/d) int_0^d g,    M = (1/d) (f(0) + f(d) - (2/d) int_0^d f).

These are computed on the polytope, without the tree.
"""

from __future__ import annotations

from fractions import Fraction

from .points import ClosedPoint, Polarization
from .potential import FSData

__all__ = ["is_monomial", "toric_points", "upper_envelope", "toric_energy", "toric_mabuchi"]

_ZERO_PT, _INF_PT = ClosedPoint("0"), ClosedPoint("inf")


def is_monomial(data: FSData) -> bool:
    return all(s.support <= {_ZERO_PT, _INF_PT} for s, _ in data.entries)


def toric_points(data: FSData) -> list[tuple[Fraction, Fraction]]:
    if not is_monomial(data):
        raise ValueError("sections are not monomials in x, y")
    m = Fraction(data.m)
    return [(s.multiplicity(_ZERO_PT) / m, lam / m) for s, lam in data.entries]


def upper_envelope(points) -> list[tuple[Fraction, Fraction]]:
    """Vertices of the upper concave envelope, by increasing abscissa."""
    best: dict[Fraction, Fraction] = {}
    for x, y in points:
        best[x] = max(y, best.get(x, y))
    hull: list = []
    for q in sorted(best.items()):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            if (a[0] - o[0]) * (q[1] - o[1]) - (a[1] - o[1]) * (q[0] - o[0]) >= 0:
                hull.pop()
            else:
                break
        hull.append(q)
    return hull


def _integral(vertices) -> Fraction:
    return sum(((x1 - x0) * (y0 + y1) / 2 for (x0, y0), (x1, y1) in zip(vertices, vertices[1:])), Fraction(0))


def _envelope(data: FSData, pol: Polarization):
    if pol.genus != 0:
        raise ValueError("the toric check is for P^1")
    data.check_degrees(pol)
    env = upper_envelope(toric_points(data))
    if env[0][0] != 0 or env[-1][0] != pol.V:
        raise ValueError("envelope does not span [0, d]")
    return env


def toric_energy(data: FSData, pol: Polarization) -> Fraction:
    env = _envelope(data, pol)
    return _integral(env) / pol.V


def toric_mabuchi(data: FSData, pol: Polarization) -> Fraction:
    env = _envelope(data, pol)
    d = Fraction(pol.V)
    f0, fd = -env[0][1], -env[-1][1]
    return (f0 + fd + 2 * _integral(env) / d) / d

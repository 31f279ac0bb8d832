"""Geodesic rays of Hermitian norms and their non-Archimedean limits.

A distinguished ray is ``chi_t = flat_embed(e, mu + t*lam)``. Its radial
limit ``v -> lim chi_t(v)/t`` is the non-Archimedean norm diagonalized by
``e`` with values ``lam``. The radial distance of two rays is
``lim d_tau(chi_t, chi'_t)/t``; :func:`isometry_check` compares it against
the non-Archimedean distance of the limits.

Distances between points of two rays are evaluated in log space. With
``M = e'^{-1} e`` computed exactly, the generalized eigenvalues ``w`` of
the two Gram matrices at time ``t`` satisfy, by Cauchy-Binet,

    e_k(w) = sum_{|I|=|J|=k} exp(2 (a_I - b_J)) |det M[J, I]|^2,

with ``a = mu + t*lam`` and ``b = mu' + t*lam'``. This needs no Gram matrix
at all, so the horizon can be as large as 1e6 without overflow. The roots
``w`` are recovered group by group from the Newton polygon of
``k -> log e_k(w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

import mpmath
import numpy as np

from .basis import Basis, parse_scalar
from .hermnorm import HermitianNorm, flat_embed
from .nanorm import NANorm, na_distance, to_rational
from .symnorm import SymmetricNormSpec, sym_eval

__all__ = [
    "GeodesicRay",
    "RadialEstimate",
    "ray_at",
    "ray_limit",
    "ray_relative_values",
    "ray_distance",
    "radial_distance",
    "isometry_check",
    "MAX_GRADED_DIM",
]

MAX_GRADED_DIM = 10
DEFAULT_HORIZON = 1e6
ERROR_PROBE_TIME = 1.0
_DPS = 50
_GROUP_GAP = 80  # natural-log separation beyond which root clusters are solved apart


@dataclass(frozen=True, eq=False)
class GeodesicRay:
    basis: Basis
    base: tuple[float, ...]
    direction: tuple[Fraction, ...]

    def __post_init__(self):
        b = Basis(self.basis)
        base = tuple(float(x) for x in self.base)
        direction = tuple(to_rational(x) for x in self.direction)
        if len(base) != b.n or len(direction) != b.n:
            raise ValueError(f"base and direction must have length {b.n}")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", direction)

    @property
    def n(self) -> int:
        return self.basis.n

    def scaled(self, c) -> "GeodesicRay":
        c = to_rational(c)
        return GeodesicRay(self.basis, self.base, tuple(c * x for x in self.direction))

    def to_json(self) -> dict:
        return {
            "basis": self.basis.to_json(),
            "base": list(self.base),
            "direction": [str(x) for x in self.direction],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GeodesicRay":
        return cls(
            Basis.from_json(data["basis"]),
            tuple(float(parse_scalar(x)) for x in data["base"]),
            tuple(to_rational(parse_scalar(x)) for x in data["direction"]),
        )


def ray_at(ray: GeodesicRay, t: float) -> HermitianNorm:
    if t < 0:
        raise ValueError(f"ray time must be >= 0, got {t}")
    lam = [m + t * float(d) for m, d in zip(ray.base, ray.direction)]
    return flat_embed(ray.basis, lam)


def ray_limit(ray: GeodesicRay) -> NANorm:
    return NANorm(ray.basis, ray.direction)


class _PairMinors:
    """All nonzero minors of ``M = e2^{-1} e1``, stored as log moduli.

    Entry ``(k, cols, rows, logdet2)`` means ``log |det M[rows, cols]|^2``
    with ``cols`` indexing the first ray's coordinates and ``rows`` the
    second's.
    """

    def __init__(self, e1: Basis, e2: Basis):
        n = e1.n
        if n > MAX_GRADED_DIM:
            raise ValueError(f"log-space ray distances are limited to n <= {MAX_GRADED_DIM}")
        m = e2.domain_matrix().inv() * e1.domain_matrix()
        rows = m.to_list()
        complex_field = m.domain.is_QQ_I if hasattr(m.domain, "is_QQ_I") else False
        ints, denom = _integerize(rows, complex_field)
        self.n = n
        self.terms = [[] for _ in range(n + 1)]
        log_denom = mpmath.log(denom)
        with mpmath.workdps(_DPS):
            for (rset, cset), det in _all_minors(ints, complex_field).items():
                k = len(rset)
                mod2 = det[0] * det[0] + det[1] * det[1] if complex_field else det * det
                if mod2 == 0:
                    continue
                self.terms[k].append((cset, rset, mpmath.log(mpmath.mpf(mod2)) - 2 * k * log_denom))


def _integerize(rows, complex_field):
    dens = []
    for r in rows:
        for z in r:
            if complex_field:
                dens += [int(z.x.denominator), int(z.y.denominator)]
            else:
                dens.append(int(z.denominator))
    d = math.lcm(*dens) if dens else 1
    if complex_field:
        ints = [[(int(z.x * d), int(z.y * d)) for z in r] for r in rows]
    else:
        ints = [[int(z * d) for z in r] for r in rows]
    return ints, d


def _all_minors(m, complex_field):
    """Determinants of every square submatrix, by Laplace expansion on the first row.

    Keys are ``(rows, cols)`` tuples; values are ints, or ``(re, im)`` pairs
    over the Gaussian integers.
    """
    n = len(m)
    if complex_field:
        mul = lambda a, b: (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])
        add = lambda a, b: (a[0] + b[0], a[1] + b[1])
        neg = lambda a: (-a[0], -a[1])
        zero = (0, 0)
    else:
        mul = lambda a, b: a * b
        add = lambda a, b: a + b
        neg = lambda a: -a
        zero = 0
    prev = {((), ()): (1, 0) if complex_field else 1}
    out = {}
    for k in range(1, n + 1):
        cur = {}
        for rset in combinations(range(n), k):
            r0, rest = rset[0], rset[1:]
            for cset in combinations(range(n), k):
                acc = zero
                for pos, c in enumerate(cset):
                    sub = prev.get((rest, cset[:pos] + cset[pos + 1 :]))
                    if sub is None:
                        continue
                    entry = m[r0][c]
                    if entry == zero:
                        continue
                    term = mul(entry, sub)
                    acc = add(acc, term if pos % 2 == 0 else neg(term))
                if acc != zero:
                    cur[(rset, cset)] = acc
        out.update(cur)
        prev = cur
    return out


def _log_esym(minors: _PairMinors, a, b):
    """``log e_k(w)`` for k = 0..n, as mpf values (None when the sum is empty)."""
    out = [mpmath.mpf(0)]
    for k in range(1, minors.n + 1):
        terms = [2 * (sum(a[i] for i in cset) - sum(b[j] for j in rset)) + ld for cset, rset, ld in minors.terms[k]]
        if not terms:
            raise ArithmeticError("degenerate pair: no nonzero minors of size %d" % k)
        top = max(terms)
        out.append(top + mpmath.log(mpmath.fsum(mpmath.exp(x - top) for x in terms)))
    return out


def _upper_hull(vals):
    hull = [0]
    for k in range(1, len(vals)):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            if (vals[j] - vals[i]) * (k - i) <= (vals[k] - vals[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    return hull


def _companion_roots(coeffs):
    # Durand-Kerner stalls on clustered roots; eigenvalues are slower but robust.
    d = len(coeffs) - 1
    comp = mpmath.zeros(d, d)
    for j in range(d):
        comp[0, j] = -coeffs[j + 1] / coeffs[0]
    for i in range(1, d):
        comp[i, i - 1] = 1
    return mpmath.eig(comp, left=False, right=False)


def _log_roots(logs):
    """Log of the roots of ``sum_k (-1)^k e_k x^{n-k}`` from ``log e_k``."""
    hull = _upper_hull(logs)
    slopes = [(logs[j] - logs[i]) / (j - i) for i, j in zip(hull, hull[1:])]
    groups = [[hull[0], hull[1]]]
    for idx in range(1, len(slopes)):
        if slopes[idx - 1] - slopes[idx] < _GROUP_GAP:
            groups[-1].append(hull[idx + 1])
        else:
            groups.append([hull[idx], hull[idx + 1]])
    out = []
    for g in groups:
        k0, k1 = g[0], g[-1]
        d = k1 - k0
        s = (logs[k1] - logs[k0]) / d
        if d == 1:
            out.append(s)
            continue
        coeffs = [(-1) ** (j - k0) * mpmath.exp(logs[j] - logs[k0] - s * (j - k0)) for j in range(k0, k1 + 1)]
        try:
            roots = mpmath.polyroots(coeffs, maxsteps=800, extraprec=4 * _DPS, error=False)
        except mpmath.libmp.NoConvergence:
            roots = _companion_roots(coeffs)
        out.extend(s + mpmath.log(abs(mpmath.re(y))) for y in roots)
    return out


def _mp_vector(base, direction, t):
    tt = mpmath.mpf(t)
    return [mpmath.mpf(m) + tt * mpmath.mpf(d.numerator) / d.denominator for m, d in zip(base, direction)]


@dataclass
class _RayPair:
    ray1: GeodesicRay
    ray2: GeodesicRay

    @cached_property
    def minors(self) -> _PairMinors:
        return _PairMinors(self.ray1.basis, self.ray2.basis)

    def relative_values(self, t1: float, t2: float | None = None) -> list[float]:
        t2 = t1 if t2 is None else t2
        with mpmath.workdps(_DPS):
            a = _mp_vector(self.ray1.base, self.ray1.direction, t1)
            b = _mp_vector(self.ray2.base, self.ray2.direction, t2)
            logs = _log_esym(self.minors, a, b)
            rel = sorted((-r / 2 for r in _log_roots(logs)), reverse=True)
        return [float(x) for x in rel]


_PAIR_CACHE_SIZE = 64
_pair_cache: dict = {}


def _pair(ray1: GeodesicRay, ray2: GeodesicRay) -> _RayPair:
    key = (id(ray1), id(ray2))
    hit = _pair_cache.get(key)
    if hit is not None and hit[0] is ray1 and hit[1] is ray2:
        return hit[2]
    if len(_pair_cache) >= _PAIR_CACHE_SIZE:
        _pair_cache.clear()
    pair = _RayPair(ray1, ray2)
    _pair_cache[key] = (ray1, ray2, pair)
    return pair


def ray_relative_values(ray1: GeodesicRay, ray2: GeodesicRay, t: float, t2: float | None = None) -> list[float]:
    """Relative position of ``ray2(t2)`` with respect to ``ray1(t)``, descending.

    Agrees with :func:`berkstab.hermnorm.relative_values` on
    ``ray_at(ray1, t)``, ``ray_at(ray2, t2)`` but stays finite for any horizon.
    """
    if ray1.n != ray2.n:
        raise ValueError(f"dimension mismatch: {ray1.n} vs {ray2.n}")
    if t < 0 or (t2 is not None and t2 < 0):
        raise ValueError("ray time must be >= 0")
    return _pair(ray1, ray2).relative_values(t, t2)


def ray_distance(tau: SymmetricNormSpec, ray1: GeodesicRay, ray2: GeodesicRay, t: float, t2: float | None = None) -> float:
    """``d_tau(ray1(t), ray2(t2))`` evaluated in log space."""
    gauge = tau if tau.n == ray1.n else tau.with_dimension(ray1.n)
    return float(sym_eval(gauge, ray_relative_values(ray1, ray2, t, t2)))


@dataclass(frozen=True)
class RadialEstimate:
    estimate: float
    error_bound: float
    horizon: float


def radial_distance(tau: SymmetricNormSpec, ray1: GeodesicRay, ray2: GeodesicRay, horizon: float = DEFAULT_HORIZON) -> RadialEstimate:
    """``d_tau(ray1(T), ray2(T)) / T`` with a heuristic O(1/T) error bound.

    The bound is ``(d_tau(base, base') + d_tau(ray1(1), ray2(1))) / T``.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    est = ray_distance(tau, ray1, ray2, horizon) / horizon
    probe = min(ERROR_PROBE_TIME, horizon)
    bound = (ray_distance(tau, ray1, ray2, 0.0) + ray_distance(tau, ray1, ray2, probe)) / horizon
    return RadialEstimate(est, bound, horizon)


@dataclass(frozen=True)
class IsometryResult:
    defect: float
    estimate: float
    na_value: float
    error_bound: float

    def passed(self, floor: float = 1e-5) -> bool:
        return self.defect <= max(floor, self.error_bound)


def isometry_check(tau: SymmetricNormSpec, ray1: GeodesicRay, ray2: GeodesicRay, horizon: float = DEFAULT_HORIZON) -> IsometryResult:
    """Compare the radial distance of two rays with the distance of their limits."""
    rad = radial_distance(tau, ray1, ray2, horizon)
    na = float(na_distance(tau, ray_limit(ray1), ray_limit(ray2)))
    return IsometryResult(abs(rad.estimate - na), rad.estimate, na, rad.error_bound)

"""Random bases, norms and rays for the Hermitian and non-Archimedean sweeps."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .basis import Basis
from .hermnorm import HermitianNorm, flat_embed
from .nanorm import NANorm
from .radial import GeodesicRay

__all__ = ["random_basis", "random_norm", "random_rational_basis", "random_na_norm", "random_ray"]


def random_basis(rng: np.random.Generator, n: int, complex_entries: bool = True) -> Basis:
    while True:
        a = rng.standard_normal((n, n))
        if complex_entries:
            a = a + 1j * rng.standard_normal((n, n))
        if np.linalg.cond(a) < 1e3:
            return Basis(a)


def random_norm(rng: np.random.Generator, n: int, spread: float = 1.5) -> HermitianNorm:
    return flat_embed(random_basis(rng, n), rng.uniform(-spread, spread, n))


def random_rational_basis(rng: np.random.Generator, n: int, entry_max: int = 2) -> Basis:
    """Invertible matrix with small integer entries."""
    while True:
        rows = [[int(rng.integers(-entry_max, entry_max + 1)) for _ in range(n)] for _ in range(n)]
        try:
            return Basis(rows)
        except ValueError:
            continue


def _rational_vector(rng: np.random.Generator, n: int, lo: int, hi: int, max_den: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(rng.integers(lo * max_den, hi * max_den + 1)), int(rng.integers(1, max_den + 1))) for _ in range(n))


def random_na_norm(rng: np.random.Generator, n: int, value_range: int = 3, max_den: int = 3) -> NANorm:
    return NANorm(random_rational_basis(rng, n), _rational_vector(rng, n, -value_range, value_range, max_den))


def random_ray(rng: np.random.Generator, n: int, complex_entries: bool | None = None, direction_range: int = 3) -> GeodesicRay:
    """Ray with a float basis, random base point and rational direction.

    Directions repeat values often, so that limits share nontrivial flags.
    """
    if complex_entries is None:
        complex_entries = bool(rng.integers(0, 2))
    basis = random_basis(rng, n, complex_entries)
    levels = rng.integers(-direction_range, direction_range + 1, size=max(1, int(rng.integers(1, n + 1))))
    direction = tuple(Fraction(int(rng.choice(levels)), int(rng.integers(1, 3))) for _ in range(n))
    return GeodesicRay(basis, tuple(rng.uniform(-1, 1, n)), direction)


def flag_preserving(rng: np.random.Generator, direction, entry_max: int = 2) -> list[list[int]]:
    """Integer unipotent matrix ``g`` whose columns keep the flag of ``direction``.

    ``g[i][j]`` may be nonzero only when ``e_i`` sits at least as deep in the
    flag as ``e_j``; ties are broken by index so that ``g`` stays invertible.
    """
    n = len(direction)
    g = [[int(i == j) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            above = direction[i] > direction[j] or (direction[i] == direction[j] and i < j)
            if above and rng.random() < 0.5:
                g[i][j] = int(rng.integers(-entry_max, entry_max + 1))
    return g


def random_parallel_pair(rng: np.random.Generator, n: int) -> tuple[GeodesicRay, GeodesicRay]:
    """Two rays with different bases and base points but the same limit, built exactly."""
    first = random_ray(rng, n)
    e = random_rational_basis(rng, n)
    first = GeodesicRay(e, first.base, first.direction)
    g = flag_preserving(rng, first.direction)
    rows = e.exact_rows
    prod = [[sum(rows[i][k] * g[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    second = GeodesicRay(Basis(prod), tuple(rng.uniform(-1, 1, n)), first.direction)
    return first, second

"""Hermitian norms on C^n, flats, Finsler distances and geodesics.

A Hermitian norm is stored through its Gram matrix ``G`` and is written
additively, ``chi(v) = -log sqrt(v* G v)``. Given a basis ``e`` and
``lam`` in R^n, :func:`flat_embed` returns the unique norm diagonalized by
``e`` with ``chi(e_i) = lam_i``; the image of R^n is the flat of ``e``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .basis import Basis, parse_scalar
from .symnorm import SymmetricNormSpec, sym_eval

__all__ = [
    "HermitianNorm",
    "CommonFlat",
    "DegenerateNormError",
    "flat_embed",
    "herm_eval",
    "codiagonalize",
    "relative_values",
    "herm_distance",
    "herm_geodesic",
    "convexity_gap",
    "act",
]

STRUCT_TOL = 1e-12
METRIC_TOL = 1e-8
MAX_DIM = 64


class DegenerateNormError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HermitianNorm:
    gram: np.ndarray

    def __post_init__(self):
        g = np.array(self.gram, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
            raise ValueError(f"Gram matrix must be square, got shape {g.shape}")
        if g.shape[0] > MAX_DIM:
            raise ValueError(f"dimension {g.shape[0]} exceeds cap {MAX_DIM}")
        if not np.all(np.isfinite(g)):
            raise DegenerateNormError("Gram matrix has non-finite entries")
        scale = np.linalg.norm(g)
        if np.linalg.norm(g - g.conj().T) > STRUCT_TOL * scale:
            raise DegenerateNormError("Gram matrix is not Hermitian")
        g = (g + g.conj().T) / 2
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise DegenerateNormError("Gram matrix is not positive definite") from None
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    def to_json(self) -> dict:
        return {"gram": [[[float(z.real), float(z.imag)] for z in row] for row in self.gram]}

    @classmethod
    def from_json(cls, data: dict) -> "HermitianNorm":
        return cls(np.array([[complex(parse_scalar(z)) for z in row] for row in data["gram"]]))


@dataclass(frozen=True, eq=False)
class CommonFlat:
    """A basis diagonalizing two norms, with both coordinate vectors."""

    basis: Basis
    mu: np.ndarray
    mu_prime: np.ndarray

    @property
    def relative(self) -> np.ndarray:
        return self.mu_prime - self.mu


def flat_embed(e, lam: Sequence[float]) -> HermitianNorm:
    """Norm diagonalized by ``e`` with ``chi(e_i) = lam_i``.

    ``G = E^{-*} diag(exp(-2 lam)) E^{-1}``.
    """
    e = Basis(e)
    lam = np.asarray([float(x) for x in lam])
    if lam.shape != (e.n,):
        raise ValueError(f"need {e.n} values, got {lam.shape[0]}")
    einv = np.linalg.inv(e.matrix)
    g = einv.conj().T @ np.diag(np.exp(-2 * lam)) @ einv
    return HermitianNorm(g)


def herm_eval(chi: HermitianNorm, v) -> float:
    v = np.asarray(v, dtype=complex)
    if v.shape != (chi.n,):
        raise ValueError(f"vector must have length {chi.n}")
    if not np.any(v):
        raise ValueError("norm of the zero vector is +inf")
    q = float(np.real(v.conj() @ chi.gram @ v))
    return -0.5 * math.log(q)


def _congruence(chi: HermitianNorm, chi2: HermitianNorm):
    if chi.n != chi2.n:
        raise ValueError(f"dimension mismatch: {chi.n} vs {chi2.n}")
    low = np.linalg.cholesky(chi.gram)
    low2 = np.linalg.cholesky(chi2.gram)
    # L^{-1} G' L^{-*} = X X* with X = L^{-1} L'; the SVD of X avoids squaring its condition number
    x = scipy.linalg.solve_triangular(low, low2, lower=True)
    u, s, _ = np.linalg.svd(x)
    if s.min() <= 0 or not np.all(np.isfinite(s)):
        raise DegenerateNormError("numerically indefinite pair")
    return low, s * s, u


def codiagonalize(chi: HermitianNorm, chi2: HermitianNorm) -> CommonFlat:
    """Simultaneously diagonalize two Hermitian norms.

    With ``G = L L*`` and ``L^{-1} G' L^{-*} = U diag(w) U*``, the basis
    ``L^{-*} U`` is orthonormal for ``G`` (so ``mu = 0``) and diagonal for
    ``G'`` with ``mu' = -log(w)/2``. Columns are ordered by decreasing
    relative value.
    """
    low, w, u = _congruence(chi, chi2)
    rel = -0.5 * np.log(w)
    order = np.argsort(-rel, kind="stable")
    cols = scipy.linalg.solve_triangular(low.conj().T, u[:, order], lower=False)
    return CommonFlat(Basis(cols), np.zeros(chi.n), rel[order])


def relative_values(chi: HermitianNorm, chi2: HermitianNorm) -> np.ndarray:
    """Relative position of ``chi2`` with respect to ``chi``, sorted descending."""
    _, w, _ = _congruence(chi, chi2)
    return np.sort(-0.5 * np.log(w))[::-1]


def _gauge(tau: SymmetricNormSpec, n: int) -> SymmetricNormSpec:
    return tau if tau.n == n else tau.with_dimension(n)


def herm_distance(tau: SymmetricNormSpec, chi: HermitianNorm, chi2: HermitianNorm) -> float:
    """Finsler distance ``d_tau``: the gauge applied to the relative values."""
    rel = relative_values(chi, chi2)
    return float(sym_eval(_gauge(tau, chi.n), list(rel)))


def herm_geodesic(chi: HermitianNorm, chi2: HermitianNorm, t: float) -> HermitianNorm:
    """Point at time ``t`` on the distinguished geodesic from ``chi`` to ``chi2``.

    Inside the common flat this is the straight segment; in matrix form it is
    ``L (L^{-1} G' L^{-*})^t L*``.
    """
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t == 0:
        return chi
    if t == 1:
        return chi2
    low, w, u = _congruence(chi, chi2)
    mt = (u * w**t) @ u.conj().T
    return HermitianNorm(low @ mt @ low.conj().T)


def act(g, chi: HermitianNorm) -> HermitianNorm:
    """Push a norm forward by ``g``: ``(g.chi)(v) = chi(g^{-1} v)``."""
    ginv = np.linalg.inv(np.asarray(g, dtype=complex))
    return HermitianNorm(ginv.conj().T @ chi.gram @ ginv)


def convexity_gap(tau: SymmetricNormSpec, segment1, segment2, grid_size: int = 33) -> float:
    """Largest midpoint-convexity violation of ``t -> d_tau(g1(t), g2(t))``.

    ``segment1`` and ``segment2`` are pairs of norms joined by distinguished
    geodesics; the function is sampled on ``grid_size`` equally spaced times.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    ts = np.linspace(0.0, 1.0, grid_size)
    a, b = segment1
    c, d = segment2
    f = [herm_distance(tau, herm_geodesic(a, b, t), herm_geodesic(c, d, t)) for t in ts]
    gap = 0.0
    for i in range(1, grid_size - 1):
        gap = max(gap, f[i] - 0.5 * (f[i - 1] + f[i + 1]))
    return gap

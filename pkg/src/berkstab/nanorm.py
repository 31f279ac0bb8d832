"""Non-Archimedean norms on C^n over the trivially valued field.

A norm is stored in diagonal form: an adapted basis ``e`` and rational
values ``lam`` with ``chi(sum a_i e_i) = min{lam_i : a_i != 0}``. The
associated filtration is ``F^t = {chi >= t} = span{e_i : lam_i >= t}``.

Two norms always share an adapted basis (a common apartment); the
distance ``d_tau`` is the gauge of the coordinate difference there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np
from sympy.polys.matrices import DomainMatrix

from .basis import Basis, parse_scalar, to_domain_matrix
from .symnorm import SymmetricNormSpec, sym_eval

__all__ = [
    "NANorm",
    "CommonApartment",
    "na_embed",
    "na_eval",
    "filtration_subspace",
    "na_codiagonalize",
    "na_distance",
    "is_adapted",
    "to_rational",
]

SUPPORT_TOL = 1e-12
RANK_TOL = 1e-9


def to_rational(x) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


class _Exact:
    """Column spaces over QQ, via sympy DomainMatrix."""

    def matrix(self, cols: list) -> DomainMatrix:
        n = len(cols[0])
        return to_domain_matrix([[c[i] for c in cols] for i in range(n)], complex_field=False)

    @staticmethod
    def columns(m: DomainMatrix) -> list:
        rows = m.to_list()
        return [[Fraction(int(r[j].numerator), int(r[j].denominator)) for r in rows] for j in range(m.shape[1])]

    def rank(self, cols: list) -> int:
        return 0 if not cols else self.matrix(cols).rank()

    def intersect(self, a: list, b: list) -> list:
        if not a or not b:
            return []
        ma, mb = self.matrix(a), self.matrix(b)
        null = ma.hstack(-mb).nullspace()  # rows span the kernel
        if null.shape[0] == 0:
            return []
        x = null[:, : len(a)].transpose()
        return self.columns(ma * x)

    def coordinates(self, basis_cols: list, v: list) -> list:
        return self.columns(self.matrix(basis_cols).lu_solve(self.matrix([v])))[0]


class _Float:
    def matrix(self, cols: list) -> np.ndarray:
        return np.array(cols, dtype=complex).T

    def rank(self, cols: list) -> int:
        if not cols:
            return 0
        s = np.linalg.svd(self.matrix(cols), compute_uv=False)
        return int(np.sum(s > RANK_TOL * max(s[0], 1.0)))

    def intersect(self, a: list, b: list) -> list:
        if not a or not b:
            return []
        ma, mb = self.matrix(a), self.matrix(b)
        qa = np.linalg.qr(ma)[0]
        qb = np.linalg.qr(mb)[0]
        # principal vectors with cosine 1 span the intersection
        u, s, _ = np.linalg.svd(qa.conj().T @ qb)
        k = int(np.sum(s > 1 - RANK_TOL))
        return list((qa @ u[:, :k]).T)

    def coordinates(self, basis_cols: list, v) -> np.ndarray:
        return np.linalg.solve(self.matrix(basis_cols), np.asarray(v, dtype=complex))


def _basis_columns(e: Basis, exact: bool) -> list:
    if exact:
        rows = e.exact_rows
        return [[rows[i][j] for i in range(e.n)] for j in range(e.n)]
    m = e.matrix
    return [m[:, j] for j in range(e.n)]


@dataclass(frozen=True, eq=False)
class NANorm:
    basis: Basis
    values: tuple[Fraction, ...]

    def __post_init__(self):
        b = Basis(self.basis)
        vals = tuple(to_rational(x) for x in self.values)
        if len(vals) != b.n:
            raise ValueError(f"need {b.n} values, got {len(vals)}")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def jumps(self) -> tuple[Fraction, ...]:
        """Distinct values, in decreasing order."""
        return tuple(sorted(set(self.values), reverse=True))

    def scaled(self, c) -> "NANorm":
        c = to_rational(c)
        if c <= 0:
            raise ValueError("scaling factor must be positive")
        return NANorm(self.basis, tuple(c * x for x in self.values))

    @classmethod
    def from_flag(cls, jumps: Sequence[tuple], n: int | None = None) -> "NANorm":
        """Build a norm from a flag with jumps.

        ``jumps`` is a list of ``(value, generators)``; ``F^value`` is spanned by
        the generators attached to every level ``>= value``. The result is
        diagonal in any basis adapted to the flag.
        """
        items = sorted(((to_rational(v), [list(g) for g in gens]) for v, gens in jumps), key=lambda t: -t[0])
        gens_all = [g for _, gens in items for g in gens]
        if not gens_all:
            raise ValueError("empty flag")
        dim = n if n is not None else len(gens_all[0])
        exact = all(isinstance(z, Rational) for g in gens_all for z in g)
        eng = _Exact() if exact else _Float()
        chosen, vals = [], []
        for v, gens in items:
            for g in gens:
                if eng.rank(chosen + [g]) > len(chosen):
                    chosen.append(g)
                    vals.append(v)
        if len(chosen) != dim:
            raise ValueError("flag is not exhaustive: generators do not span the space")
        rows = [[c[i] for c in chosen] for i in range(dim)]
        return cls(Basis(rows if exact else np.array(rows, dtype=complex)), tuple(vals))

    def to_json(self) -> dict:
        return {"basis": self.basis.to_json(), "values": [str(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> "NANorm":
        return cls(Basis.from_json(data["basis"]), tuple(to_rational(parse_scalar(v)) for v in data["values"]))


@dataclass(frozen=True, eq=False)
class CommonApartment:
    basis: Basis
    mu: tuple[Fraction, ...]
    mu_prime: tuple[Fraction, ...]

    @property
    def pairs(self) -> list[tuple[Fraction, Fraction]]:
        return sorted(zip(self.mu, self.mu_prime), reverse=True)


def na_embed(e, lam: Sequence) -> NANorm:
    return NANorm(Basis(e), tuple(lam))


def na_eval(chi: NANorm, v) -> Fraction:
    """``min{lam_i : a_i != 0}`` where ``v = sum a_i e_i``."""
    v = list(v)
    if len(v) != chi.n:
        raise ValueError(f"vector must have length {chi.n}")
    exact = chi.basis.is_exact and all(isinstance(z, Rational) for z in v)
    if exact:
        if all(z == 0 for z in v):
            raise ValueError("the zero vector has value +inf")
        a = _Exact().coordinates(_basis_columns(chi.basis, True), v)
        support = [i for i, z in enumerate(a) if z != 0]
    else:
        vv = np.asarray([complex(z) for z in v])
        nv = np.linalg.norm(vv)
        if nv == 0:
            raise ValueError("the zero vector has value +inf")
        a = np.linalg.solve(chi.basis.matrix, vv)
        support = [i for i, z in enumerate(a) if abs(z) > SUPPORT_TOL * nv]
    return min(chi.values[i] for i in support)


def filtration_subspace(chi: NANorm, level) -> list:
    """Spanning vectors of ``F^level = span{e_i : lam_i >= level}``."""
    level = to_rational(level)
    cols = _basis_columns(chi.basis, chi.basis.is_exact)
    return [cols[i] for i in range(chi.n) if chi.values[i] >= level]


def _flag(chi: NANorm, exact: bool):
    cols = _basis_columns(chi.basis, exact)
    return [(a, [cols[i] for i in range(chi.n) if chi.values[i] >= a]) for a in chi.jumps]


def na_codiagonalize(chi: NANorm, chi2: NANorm) -> CommonApartment:
    """A basis adapted to both filtrations.

    For jump levels ``a_i`` of ``chi`` and ``b_j`` of ``chi2`` (both
    descending), vectors of ``F^{a_i} cap F'^{b_j}`` are added greedily in
    lexicographic order of ``(i, j)``, each receiving the value pair
    ``(a_i, b_j)``. The count of pairs at ``(i, j)`` is the second mixed
    difference of ``dim(F^{a_i} cap F'^{b_j})``, so the multiset of pairs
    depends only on the two flags.
    """
    if chi.n != chi2.n:
        raise ValueError(f"dimension mismatch: {chi.n} vs {chi2.n}")
    exact = chi.basis.is_exact and chi2.basis.is_exact
    eng = _Exact() if exact else _Float()
    f1, f2 = _flag(chi, exact), _flag(chi2, exact)
    chosen: list = []
    labels: list[tuple[int, int]] = []
    for i, (a, sa) in enumerate(f1):
        for j, (b, sb) in enumerate(f2):
            w = eng.intersect(sa, sb)
            if not w:
                continue
            current = [c for c, (ii, jj) in zip(chosen, labels) if ii <= i and jj <= j]
            r = len(current)
            for vec in w:
                if eng.rank(current + [vec]) > r:
                    current.append(vec)
                    chosen.append(vec)
                    labels.append((i, j))
                    r += 1
    if len(chosen) != chi.n:
        raise ArithmeticError("common apartment construction did not produce a basis")
    mu = [f1[i][0] for i, _ in labels]
    mu2 = [f2[j][0] for _, j in labels]
    order = sorted(range(chi.n), key=lambda k: (-mu[k], -mu2[k]))
    cols = [chosen[k] for k in order]
    if exact:
        basis = Basis([[c[r] for c in cols] for r in range(chi.n)])
    else:
        basis = Basis(np.array(cols, dtype=complex).T)
    return CommonApartment(basis, tuple(mu[k] for k in order), tuple(mu2[k] for k in order))


def is_adapted(basis: Basis, values: Sequence[Fraction], chi: NANorm) -> bool:
    """Whether ``basis`` with ``values`` describes the same filtration as ``chi``."""
    exact = basis.is_exact and chi.basis.is_exact
    eng = _Exact() if exact else _Float()
    cols = _basis_columns(basis, exact)
    levels = sorted(set(values) | set(chi.values), reverse=True)
    for t in levels:
        mine = [cols[k] for k in range(basis.n) if values[k] >= t]
        theirs = filtration_subspace(chi, t) if exact else [np.asarray(c) for c in filtration_subspace(chi, t)]
        r1, r2 = eng.rank(mine), eng.rank(theirs)
        if r1 != r2 or eng.rank(mine + theirs) != r1:
            return False
    return True


def na_distance(tau: SymmetricNormSpec, chi: NANorm, chi2: NANorm):
    """``tau(mu' - mu)`` in a common apartment; exact for rational gauges."""
    ap = na_codiagonalize(chi, chi2)
    diff = [b - a for a, b in zip(ap.mu, ap.mu_prime)]
    gauge = tau if tau.n == chi.n else tau.with_dimension(chi.n)
    return sym_eval(gauge, diff)

"""Bases of C^n, in floating or exact rational form.

A basis is stored as the n x n matrix whose columns are the basis vectors.
Entries that are all ``int``/``Fraction`` give an *exact* basis, on which
the non-Archimedean routines run in rational arithmetic; anything else is
held as a complex float array.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

__all__ = ["Basis", "SingularBasisError", "parse_scalar", "to_domain_matrix"]

DET_TOL = 1e-12


class SingularBasisError(ValueError):
    pass


def parse_scalar(x):
    """Turn a JSON-ish scalar into int/Fraction/complex.

    Accepts numbers, rational strings ``"p/q"``, and ``[re, im]`` pairs.
    """
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex entry must be [re, im], got {x!r}")
        re, im = (parse_scalar(t) for t in x)
        if isinstance(im, Rational) and im == 0:
            return re
        return complex(float(re), float(im))
    if isinstance(x, bool):
        raise ValueError(f"not a number: {x!r}")
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, complex):
        return x
    if isinstance(x, str):
        s = x.strip()
        try:
            return Fraction(s)
        except ValueError:
            return complex(s.replace("i", "j"))
    raise ValueError(f"not a number: {x!r}")


def _exact_complex(z) -> tuple[Fraction, Fraction]:
    if isinstance(z, Rational):
        return Fraction(z), Fraction(0)
    z = complex(z)
    return Fraction(z.real), Fraction(z.imag)


def to_domain_matrix(rows, complex_field: bool | None = None) -> DomainMatrix:
    """Exact DomainMatrix from a nested sequence.

    Floats are converted *exactly* (they are dyadic rationals). The field is
    QQ when every entry is real, QQ_I otherwise.
    """
    rows = [list(r) for r in rows]
    parts = [[_exact_complex(z) for z in r] for r in rows]
    if complex_field is None:
        complex_field = any(im != 0 for r in parts for _, im in r)
    shape = (len(rows), len(rows[0]) if rows else 0)
    if complex_field:
        data = [[QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator)) for re, im in r] for r in parts]
        return DomainMatrix(data, shape, QQ_I)
    data = [[QQ(re.numerator, re.denominator) for re, _ in r] for r in parts]
    return DomainMatrix(data, shape, QQ)


class Basis:
    """Columns of an invertible n x n matrix.

    Parameters
    ----------
    columns : array-like, shape (n, n)
        Column ``i`` is the basis vector ``e_i``.
    """

    __slots__ = ("_float", "_exact", "n")

    def __init__(self, columns):
        if isinstance(columns, Basis):
            self._float, self._exact, self.n = columns._float, columns._exact, columns.n
            return
        if isinstance(columns, np.ndarray) and columns.dtype != object:
            arr = columns.astype(complex)
            exact = None
        else:
            rows = [list(r) for r in columns]
            if all(isinstance(z, Rational) for r in rows for z in r):
                exact = tuple(tuple(Fraction(z) for z in r) for r in rows)
                arr = np.array([[float(z) for z in r] for r in exact], dtype=complex)
            else:
                exact = None
                arr = np.array([[complex(z) for z in r] for r in rows], dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError(f"basis must be a non-empty square matrix, got shape {arr.shape}")
        self.n = arr.shape[0]
        self._float = arr
        self._exact = exact
        self._check_invertible()

    def _check_invertible(self):
        if self._exact is not None:
            if to_domain_matrix(self._exact).det() == 0:
                raise SingularBasisError("basis is singular")
            return
        a = self._float
        if not np.all(np.isfinite(a)):
            raise SingularBasisError("basis has non-finite entries")
        scale = np.prod(np.linalg.norm(a, axis=0))
        det = abs(np.linalg.det(a))
        if scale == 0 or det <= DET_TOL * scale or not np.isfinite(np.linalg.cond(a)):
            raise SingularBasisError("basis is singular or numerically degenerate")

    @classmethod
    def identity(cls, n: int) -> "Basis":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def is_exact(self) -> bool:
        return self._exact is not None

    @property
    def matrix(self) -> np.ndarray:
        """Complex float copy of the column matrix."""
        return self._float.copy()

    @property
    def exact_rows(self):
        if self._exact is None:
            raise ValueError("basis is not exact")
        return self._exact

    def column(self, i: int) -> np.ndarray:
        return self._float[:, i].copy()

    def permuted(self, order: Sequence[int]) -> "Basis":
        if self._exact is not None:
            return Basis([[r[j] for j in order] for r in self._exact])
        return Basis(self._float[:, list(order)])

    def domain_matrix(self) -> DomainMatrix:
        src = self._exact if self._exact is not None else self._float.tolist()
        return to_domain_matrix(src)

    def to_json(self):
        if self._exact is not None:
            return [[str(z) for z in r] for r in self._exact]
        return [[[float(z.real), float(z.imag)] for z in r] for r in self._float]

    @classmethod
    def from_json(cls, rows) -> "Basis":
        return cls([[parse_scalar(z) for z in r] for r in rows])

    def __eq__(self, other):
        if not isinstance(other, Basis):
            return NotImplemented
        if self._exact is not None and other._exact is not None:
            return self._exact == other._exact
        return self.n == other.n and np.array_equal(self._float, other._float)

    def __hash__(self):
        return hash(self._exact) if self._exact is not None else hash(self._float.tobytes())

    def __repr__(self):
        tag = "exact" if self.is_exact else "float"
        return f"Basis(n={self.n}, {tag})"

"""Symmetric norms on R^n.

A symmetric norm is a norm invariant under coordinate permutations. It is
the gauge from which every Finsler distance in this package is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

__all__ = [
    "SymmetricNormSpec",
    "CheckReport",
    "lp",
    "topk",
    "sym_eval",
    "sym_check",
]


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


@dataclass(frozen=True)
class SymmetricNormSpec:
    """A symmetric norm on R^n.

    ``kind`` is ``"lp"`` (with ``p`` in [1, inf]) or ``"topk"`` (ordered
    weighted l1 norm: ``sum_k w_k |x|_(k)`` over the decreasingly sorted
    moduli, with non-increasing positive weights).
    """

    kind: str
    n: int
    p: float | None = None
    weights: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be positive, got {self.n}")
        if self.kind == "lp":
            if self.p is None or not (self.p >= 1):
                raise ValueError(f"lp norm needs p >= 1, got {self.p}")
        elif self.kind == "topk":
            w = self.weights
            if not w:
                raise ValueError("topk norm needs at least one weight")
            if len(w) > self.n:
                raise ValueError("more weights than coordinates")
            if any(x <= 0 for x in w):
                raise ValueError("topk weights must be strictly positive")
            if any(a < b for a, b in zip(w, w[1:])):
                raise ValueError("topk weights must be non-increasing")
        else:
            raise ValueError(f"unknown norm kind {self.kind!r}")

    def with_dimension(self, n: int) -> "SymmetricNormSpec":
        """Same gauge on R^n (topk weights are kept, truncated if needed)."""
        if self.kind == "lp":
            return SymmetricNormSpec("lp", n, p=self.p)
        return SymmetricNormSpec("topk", n, weights=self.weights[:n])

    @property
    def exact(self) -> bool:
        """Whether rational inputs give rational outputs."""
        if self.kind == "lp":
            return self.p == 1 or math.isinf(self.p)
        return all(_is_exact(w) for w in self.weights)

    def to_json(self) -> dict:
        if self.kind == "lp":
            p = "inf" if math.isinf(self.p) else (int(self.p) if float(self.p).is_integer() else self.p)
            return {"kind": "lp", "p": p, "n": self.n}
        return {"kind": "topk", "weights": [str(w) for w in self.weights], "n": self.n}

    @classmethod
    def from_json(cls, data: dict, n: int | None = None) -> "SymmetricNormSpec":
        kind = data.get("kind")
        dim = data.get("n", n)
        if kind == "lp":
            p = data.get("p")
            p = math.inf if p in ("inf", "Infinity", float("inf")) else float(p)
            return cls("lp", int(dim), p=p)
        if kind == "topk":
            weights = tuple(Fraction(str(w)) for w in data["weights"])
            return cls("topk", int(dim if dim is not None else len(weights)), weights=weights)
        raise ValueError(f"unknown norm kind {kind!r}")

    def __str__(self):
        if self.kind == "lp":
            return "linf" if math.isinf(self.p) else f"l{self.p:g}"
        return "topk(" + ",".join(str(w) for w in self.weights) + ")"


def lp(p, n: int) -> SymmetricNormSpec:
    return SymmetricNormSpec("lp", n, p=math.inf if p in ("inf", math.inf) else float(p))


def topk(weights: Sequence, n: int | None = None) -> SymmetricNormSpec:
    w = tuple(Fraction(x) if not isinstance(x, float) else x for x in weights)
    return SymmetricNormSpec("topk", len(w) if n is None else n, weights=w)


def sym_eval(tau: SymmetricNormSpec, x: Sequence):
    """Evaluate ``tau(x)``.

    Returns a :class:`~fractions.Fraction` when ``tau`` is exact (l1, linf,
    rational topk) and every coordinate of ``x`` is rational; a float
    otherwise.
    """
    x = list(x)
    if len(x) != tau.n:
        raise ValueError(f"dimension mismatch: norm on R^{tau.n}, vector of length {len(x)}")
    exact = tau.exact and all(_is_exact(t) for t in x)
    if exact:
        mods = sorted((abs(Fraction(t)) for t in x), reverse=True)
        if tau.kind == "lp":
            return sum(mods, Fraction(0)) if tau.p == 1 else mods[0]
        return sum((w * m for w, m in zip(tau.weights, mods)), Fraction(0))

    a = np.abs(np.asarray([float(t) for t in x], dtype=float))
    if tau.kind == "lp":
        p = tau.p
        if math.isinf(p):
            return float(a.max())
        if p == 1:
            return float(math.fsum(a))
        if p == 2:
            return float(math.hypot(*a)) if len(a) > 1 else float(a[0])
        scale = a.max()
        if scale == 0:
            return 0.0
        return float(scale * math.fsum((a / scale) ** p) ** (1.0 / p))
    a = np.sort(a)[::-1]
    w = np.asarray([float(v) for v in tau.weights])
    return float(math.fsum(w * a[: len(w)]))


@dataclass(frozen=True)
class CheckReport:
    samples: int
    subadditivity: float
    permutation: float
    sign: float
    homogeneity: float

    @property
    def defect(self) -> float:
        return max(self.subadditivity, self.permutation, self.sign, self.homogeneity)


def sym_check(tau: SymmetricNormSpec, sample_count: int = 1000, seed: int = 0) -> CheckReport:
    """Sample the norm axioms and permutation invariance.

    Each defect is the largest relative violation seen over the samples.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    n = tau.n
    sub = perm = sign = hom = 0.0
    for _ in range(sample_count):
        x = rng.standard_normal(n) * rng.exponential(2.0)
        y = rng.standard_normal(n) * rng.exponential(2.0)
        tx, ty = sym_eval(tau, x), sym_eval(tau, y)
        scale = max(tx + ty, 1.0)
        sub = max(sub, (sym_eval(tau, x + y) - tx - ty) / scale)
        perm = max(perm, abs(sym_eval(tau, rng.permutation(x)) - tx) / max(tx, 1.0))
        signs = rng.choice([-1.0, 1.0], n)
        sign = max(sign, abs(sym_eval(tau, signs * x) - tx) / max(tx, 1.0))
        c = rng.uniform(-3, 3)
        hom = max(hom, abs(sym_eval(tau, c * x) - abs(c) * tx) / max(abs(c) * tx, 1.0))
    return CheckReport(sample_count, max(sub, 0.0), perm, sign, hom)

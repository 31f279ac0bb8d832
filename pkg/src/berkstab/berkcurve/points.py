"""Points of the Berkovich projective line: closed points and divisorial valuations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

__all__ = ["ClosedPoint", "Valuation", "Polarization", "TRIVIAL", "branch", "to_fraction"]


def to_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise ValueError(f"not a rational number: {x!r}")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ValueError(f"not a rational number: {x!r}")


@dataclass(frozen=True, order=True)
class ClosedPoint:
    """A point of P^1: ``"0"``, ``"1/2"``, ``"inf"``, or an opaque ``"label:NAME"``.

    Coordinates are the ratio ``x/y``, so ``"0"`` is where ``x`` vanishes and
    ``"inf"`` is where ``y`` vanishes.
    """

    key: str

    def __post_init__(self):
        object.__setattr__(self, "key", self._canonical(self.key))

    @staticmethod
    def _canonical(key) -> str:
        if isinstance(key, ClosedPoint):
            return key.key
        if isinstance(key, Rational) and not isinstance(key, bool):
            return str(Fraction(key))
        if not isinstance(key, str):
            raise ValueError(f"bad point {key!r}")
        s = key.strip()
        if s in ("inf", "oo", "infinity", "∞"):
            return "inf"
        if s.startswith("label:"):
            if len(s) == len("label:"):
                raise ValueError("empty point label")
            return s
        try:
            return str(Fraction(s))
        except ValueError:
            raise ValueError(f"bad point {key!r}: expected a rational, 'inf' or 'label:NAME'") from None

    @property
    def is_label(self) -> bool:
        return self.key.startswith("label:")

    @property
    def coordinate(self) -> Fraction | None:
        """``x/y`` for rational points, None at infinity and for labels."""
        if self.key == "inf" or self.is_label:
            return None
        return Fraction(self.key)

    def __str__(self):
        return self.key


@dataclass(frozen=True)
class Valuation:
    """The trivial valuation (``point is None``) or ``c * ord_point`` with ``c > 0``."""

    point: ClosedPoint | None = None
    c: Fraction = Fraction(0)

    def __post_init__(self):
        c = to_fraction(self.c)
        if self.point is None:
            if c != 0:
                raise ValueError("the trivial valuation has c = 0")
        else:
            object.__setattr__(self, "point", ClosedPoint(self.point))
            if c <= 0:
                raise ValueError(f"branch valuations need c > 0, got {c}")
        object.__setattr__(self, "c", c)

    @property
    def is_trivial(self) -> bool:
        return self.point is None

    def sort_key(self):
        return ("",) if self.point is None else (self.point.key, self.c)

    def __str__(self):
        return "triv" if self.point is None else f"{self.c}*ord_{self.point}"


TRIVIAL = Valuation()


def branch(point, c) -> Valuation:
    return Valuation(ClosedPoint(point), to_fraction(c))


@dataclass(frozen=True)
class Polarization:
    """Degree ``V`` of the line bundle and genus of the curve."""

    V: int = 1
    genus: int = 0

    def __post_init__(self):
        if isinstance(self.V, bool) or int(self.V) != self.V or self.V < 1:
            raise ValueError(f"degree V must be a positive integer, got {self.V}")
        if isinstance(self.genus, bool) or int(self.genus) != self.genus or self.genus < 0:
            raise ValueError(f"genus must be a nonnegative integer, got {self.genus}")
        object.__setattr__(self, "V", int(self.V))
        object.__setattr__(self, "genus", int(self.genus))

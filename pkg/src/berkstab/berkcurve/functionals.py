"""Energy, entropy and Mabuchi functionals on the Berkovich projective line."""

from __future__ import annotations

from fractions import Fraction

from .measure import DivisorialMeasure, monge_ampere, solve_ma
from .points import Polarization, Valuation
from .potential import PLPotential, SectionDivisor

__all__ = [
    "val_section",
    "pairing",
    "energy",
    "log_discrepancy",
    "entropy",
    "ricci_energy",
    "mean_scalar",
    "mabuchi",
    "dual_energy",
]


def val_section(v: Valuation, s: SectionDivisor) -> Fraction:
    if v.is_trivial:
        return Fraction(0)
    return v.c * s.multiplicity(v.point)


def pairing(phi: PLPotential, mu: DivisorialMeasure) -> Fraction:
    """``int phi dmu``."""
    return sum((w * phi(v) for v, w in mu.atoms), Fraction(0))


def energy(phi: PLPotential, pol: Polarization) -> Fraction:
    """Monge-Ampere energy relative to the trivial metric.

    On a curve, ``E(phi) = (int phi MA(phi) + phi(triv)) / 2``.
    """
    return (pairing(phi, monge_ampere(phi, pol)) + phi.root) / 2


def log_discrepancy(v: Valuation) -> Fraction:
    """``A(c*ord_xi) = c``: closed points are prime divisors on the curve itself."""
    return Fraction(0) if v.is_trivial else v.c


def entropy(mu: DivisorialMeasure) -> Fraction:
    return sum((w * log_discrepancy(v) for v, w in mu.atoms), Fraction(0))


def mean_scalar(pol: Polarization) -> Fraction:
    return Fraction(2 - 2 * pol.genus, pol.V)


def ricci_energy(phi: PLPotential, pol: Polarization) -> Fraction:
    """Curvature of the canonical bundle modelled as ``(2g - 2) * delta_triv``."""
    return Fraction(2 * pol.genus - 2, pol.V) * phi.root


def mabuchi(phi: PLPotential, pol: Polarization) -> Fraction:
    """``S * E + R + H`` with ``H`` the entropy of ``MA(phi)``."""
    return mean_scalar(pol) * energy(phi, pol) + ricci_energy(phi, pol) + entropy(monge_ampere(phi, pol))


def dual_energy(mu: DivisorialMeasure, pol: Polarization) -> Fraction:
    """``E(phi_mu) - int phi_mu dmu`` for the solution ``phi_mu`` of ``MA = mu``."""
    phi = solve_ma(mu, pol)
    return energy(phi, pol) - pairing(phi, mu)

"""Exact non-Archimedean pluripotential theory on the Berkovich projective line."""

from .envelope import ConstantDistance, d1, dist_to_constants, envelope
from .functionals import (
    dual_energy,
    energy,
    entropy,
    log_discrepancy,
    mabuchi,
    mean_scalar,
    pairing,
    ricci_energy,
    val_section,
)
from .measure import DivisorialMeasure, InfeasibleMeasureError, dirac, monge_ampere, solve_ma
from .points import TRIVIAL, ClosedPoint, Polarization, Valuation, branch
from .potential import (
    FSData,
    PLPotential,
    Profile,
    PshError,
    SectionDivisor,
    combine,
    fs_profile,
    parse_linear_forms,
    potential_eval,
)
from .stability import ReportRow, StabilityReport, stability_report

__all__ = [
    "ClosedPoint",
    "Valuation",
    "Polarization",
    "TRIVIAL",
    "branch",
    "Profile",
    "PLPotential",
    "PshError",
    "SectionDivisor",
    "FSData",
    "parse_linear_forms",
    "fs_profile",
    "potential_eval",
    "combine",
    "DivisorialMeasure",
    "InfeasibleMeasureError",
    "dirac",
    "monge_ampere",
    "solve_ma",
    "val_section",
    "pairing",
    "energy",
    "log_discrepancy",
    "entropy",
    "ricci_energy",
    "mean_scalar",
    "mabuchi",
    "dual_energy",
    "envelope",
    "d1",
    "dist_to_constants",
    "ConstantDistance",
    "ReportRow",
    "StabilityReport",
    "stability_report",
]

"""Hermitian and non-Archimedean norm geometry, and K-stability on the Berkovich line."""

from .basis import Basis, SingularBasisError
from .hermnorm import (
    CommonFlat,
    DegenerateNormError,
    HermitianNorm,
    act,
    codiagonalize,
    convexity_gap,
    flat_embed,
    herm_distance,
    herm_eval,
    herm_geodesic,
    relative_values,
)
from .nanorm import CommonApartment, NANorm, filtration_subspace, na_codiagonalize, na_distance, na_embed, na_eval
from .radial import GeodesicRay, isometry_check, radial_distance, ray_at, ray_limit
from .symnorm import SymmetricNormSpec, lp, sym_check, sym_eval, topk

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "SingularBasisError",
    "SymmetricNormSpec",
    "lp",
    "topk",
    "sym_eval",
    "sym_check",
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
    "NANorm",
    "CommonApartment",
    "na_embed",
    "na_eval",
    "filtration_subspace",
    "na_codiagonalize",
    "na_distance",
    "GeodesicRay",
    "ray_at",
    "ray_limit",
    "radial_distance",
    "isometry_check",
]

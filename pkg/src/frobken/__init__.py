"""Frobenius pushforwards, conic modules and noncommutative blowups of
normal affine semigroup rings, in exact integer arithmetic."""

__version__ = "0.1.0"

from .errors import FrobkenError
from .lattice import ConeData, LatticePresentation, facet_normals, orthant
from .modules import ClassId, Decomposition, MonomialModule, canonical_class, free_module, from_shift
from .frobenius import frobenius_pushforward

__all__ = [
    "ClassId",
    "ConeData",
    "Decomposition",
    "FrobkenError",
    "LatticePresentation",
    "MonomialModule",
    "canonical_class",
    "facet_normals",
    "free_module",
    "from_shift",
    "frobenius_pushforward",
    "orthant",
]

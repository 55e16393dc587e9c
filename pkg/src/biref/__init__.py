"""Bireflectionality and reversibility in finite orthogonal groups over GF(q), q odd."""

from .algebra import NONSQUARE, SQUARE, Field, Poly, SquareClass, field_make
from .classify import Verdict, biref_in_Omega, biref_in_SO, classify, reversible_in_Omega
from .errors import BirefError, InputError, TheoremViolation
from .ortho import BlockSpec, Isometry, build_block, build_from_specs, in_omega, orthogonal_decompose, spinor_norm
from .space import BilinearSpace

__version__ = "0.1.0"

__all__ = [
    "BilinearSpace",
    "BirefError",
    "BlockSpec",
    "Field",
    "InputError",
    "Isometry",
    "NONSQUARE",
    "Poly",
    "SQUARE",
    "SquareClass",
    "TheoremViolation",
    "Verdict",
    "biref_in_Omega",
    "biref_in_SO",
    "build_block",
    "build_from_specs",
    "classify",
    "field_make",
    "in_omega",
    "orthogonal_decompose",
    "reversible_in_Omega",
    "spinor_norm",
]

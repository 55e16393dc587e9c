"""Decision procedures for bireflectionality and reversibility.

All predicates read conjugation-invariant data only: the elementary divisor
profile, dimensions, discriminants of an orthogonal decomposition and the
homogeneous discriminants of the odd (x -+ 1)-pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import NONSQUARE, SQUARE, Field, Poly, SquareClass, class_of_minus_one
from .errors import (
    CentralizerTooLarge,
    EtaSquareNotMinusOne,
    NotAReversal,
    NotInOmega,
    NotReversibleInGL,
    NotSL,
    NotSpecial,
    TheoremViolation,
    WrongDimensionClass,
    WrongFieldBranch,
)
from .linalg import EDProfile, det, elementary_divisors, eye, fitting_dim_phi_squared, matmul, scalar
from .ortho import Isometry, TypeSummary, in_omega, orthogonal_decompose, reversers
from .space import discriminant, is_hyperbolic


def _is_pm_one(F: Field, p: Poly) -> bool:
    return p.degree == 1 and p.coeffs[0] in (1, F.minus_one)


@dataclass(frozen=True)
class NCounts:
    """n[j] counts elementary divisors (x +- 1)^d with d = j mod 8 (j = 1..8)."""

    n: dict
    fitting2: int

    def __getitem__(self, j: int) -> int:
        return self.n[j]

    def to_json(self) -> dict:
        out = {f"n{j}": self.n[j] for j in range(1, 9)}
        out["fitting2"] = self.fitting2
        return out


def n_counts(phi: Isometry) -> NCounts:
    F = phi.field
    ed = phi.elementary_divisors()
    n = {j: 0 for j in range(1, 9)}
    for p, d, m in ed.entries:
        if _is_pm_one(F, p):
            n[(d - 1) % 8 + 1] += m
    return NCounts(n, fitting_dim_phi_squared(F, phi.matrix))


def _has_odd_pm(ed: EDProfile, F: Field) -> bool:
    return any(_is_pm_one(F, p) and d % 2 for p, d, _ in ed.entries)


def _require_omega(phi: Isometry, assume_in_omega: bool | None) -> None:
    ok = in_omega(phi) if assume_in_omega is None else assume_in_omega
    if not ok:
        raise NotInOmega("element is not in Omega(V)")


def biref_in_SO(phi: Isometry) -> bool:
    if phi.det != 1:
        raise NotSpecial("det = -1")
    F = phi.field
    n = phi.dim
    if n % 4 != 2 or _has_odd_pm(phi.elementary_divisors(), F):
        return True
    return F.q == 3 and is_hyperbolic(phi.space)


def condition_c1(phi: Isometry) -> bool:
    """Some elementary divisor p^d with p != x +- 1 and d odd."""
    F = phi.field
    return any(not _is_pm_one(F, p) and d % 2 for p, d, _ in phi.elementary_divisors().entries)


def condition_c2(phi: Isometry, summary: TypeSummary | None = None) -> bool:
    """phi has an orthogonal summand of even dimension and discriminant -1."""
    F = phi.field
    summary = summary or orthogonal_decompose(phi)
    minus = class_of_minus_one(F)
    # even-dimensional indecomposables of type other than 2+-
    if any(s.tag not in ("2+", "2-") and s.disc is minus for s in summary.summands):
        return True
    odd = summary.odd_pm_blocks()
    if len(odd) < 2:
        return False
    hom = summary.homogeneous
    forced_equal = all(m == 1 for m, _ in hom.values()) and len({s.disc for s in odd}) == 1
    lone_pair = len(odd) == 2 and len(hom) == 1 and next(iter(hom.values())) == (2, SQUARE)
    return not (forced_equal or lone_pair)


def condition_c3(phi: Isometry, counts: NCounts | None = None) -> bool:
    c = counts or n_counts(phi)
    lhs = c[3] + c[5] + c[2] // 2 + c[6] // 2
    return (lhs - c.fitting2 // 4) % 2 == 0


def omega_conditions(phi: Isometry, *, assume_in_omega: bool | None = None, summary=None):
    """(C1, C2, C3); C3 is None when C1 holds (it is only defined otherwise)."""
    if phi.field.q % 4 != 3:
        raise WrongFieldBranch("conditions C1-C3 apply to q = 3 mod 4")
    _require_omega(phi, assume_in_omega)
    c1 = condition_c1(phi)
    c2 = condition_c2(phi, summary)
    c3 = None if c1 else condition_c3(phi)
    return c1, c2, c3


def biref_in_Omega(phi: Isometry, *, assume_in_omega: bool | None = None, summary=None) -> bool:
    _require_omega(phi, assume_in_omega)
    F = phi.field
    if F.q % 4 == 1:
        return phi.dim % 4 != 2 or _has_odd_pm(phi.elementary_divisors(), F)
    if not biref_in_SO(phi):
        return False
    c1, c2, c3 = omega_conditions(phi, assume_in_omega=True, summary=summary)
    return bool(c1 or c2 or c3)


def r_profile(phi: Isometry, *, assume_in_omega: bool | None = None, summary=None) -> bool:
    """Shape of the reversible elements of Omega that are not bireflectional (q = 3 mod 4)."""
    if phi.field.q % 4 != 3:
        raise WrongFieldBranch("the R-profile is only defined for q = 3 mod 4")
    _require_omega(phi, assume_in_omega)
    summary = summary or orthogonal_decompose(phi)
    odd = summary.odd_pm_blocks()
    if len(odd) != 2 or odd[0].eps != odd[1].eps or odd[0].exponent != odd[1].exponent:
        return False
    key = (odd[0].eps, odd[0].exponent)
    if summary.homogeneous.get(key) != (2, SQUARE):
        return False
    if condition_c1(phi):
        return False
    return (phi.dim - 2 * odd[0].exponent) % 8 == 4


def reversible_in_Omega(phi: Isometry, *, assume_in_omega: bool | None = None, summary=None) -> bool:
    b = biref_in_Omega(phi, assume_in_omega=assume_in_omega, summary=summary)
    if phi.field.q % 4 == 1:
        return b
    return b or r_profile(phi, assume_in_omega=True, summary=summary)


# ---------------------------------------------------------------- verdicts


@dataclass
class Verdict:
    det: int
    spinor_norm: SquareClass
    in_omega: bool | None
    dim: int
    disc: SquareClass
    n_counts: NCounts
    biref_O: bool = True
    biref_SO: bool | None = None
    biref_Omega: bool | None = None
    reversible_Omega: bool | None = None
    C1: bool | None = None
    C2: bool | None = None
    C3: bool | None = None
    r_profile: bool | None = None
    witness: tuple | None = None
    reason: str | None = None
    extra: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "det": 1 if self.det == 1 else -1,
            "spinor_norm": self.spinor_norm.name.lower(),
            "in_omega": self.in_omega,
            "dim": self.dim,
            "disc": self.disc.name.lower(),
            "n_counts": self.n_counts.to_json(),
            "C1": self.C1,
            "C2": self.C2,
            "C3": self.C3,
            "r_profile": self.r_profile,
            "biref_O": self.biref_O,
            "biref_SO": self.biref_SO,
            "biref_Omega": self.biref_Omega,
            "reversible_Omega": self.reversible_Omega,
            "witness": None if self.witness is None else [w.tolist() for w in self.witness],
        }
        if self.reason:
            out["reason"] = self.reason
        return out


def classify(
    phi: Isometry,
    *,
    assume_in_omega: bool | None = None,
    witness: bool = False,
    witness_cap: int = 3**12,
) -> Verdict:
    """Full verdict for phi.  Omega membership is decided by det and spinor norm
    unless ``assume_in_omega`` is given (needed on anisotropic spaces)."""
    F = phi.field
    theta = phi.spinor_norm
    v = Verdict(
        det=phi.det,
        spinor_norm=theta,
        in_omega=None,
        dim=phi.dim,
        disc=discriminant(phi.space),
        n_counts=n_counts(phi),
    )
    if phi.det != 1:
        v.in_omega = False
        v.reason = "det = -1: not in SO(V)"
        return v
    v.biref_SO = biref_in_SO(phi)
    if assume_in_omega is None:
        v.in_omega = in_omega(phi)
    else:
        v.in_omega = bool(assume_in_omega)
    if not v.in_omega:
        v.reason = "spinor norm is a nonsquare: not in Omega(V)"
        return v
    summary = orthogonal_decompose(phi)
    v.C1 = condition_c1(phi)
    if F.q % 4 == 3:
        v.C1, v.C2, v.C3 = omega_conditions(phi, assume_in_omega=True, summary=summary)
        v.r_profile = r_profile(phi, assume_in_omega=True, summary=summary)
    v.biref_Omega = biref_in_Omega(phi, assume_in_omega=True, summary=summary)
    v.reversible_Omega = reversible_in_Omega(phi, assume_in_omega=True, summary=summary)
    if witness and v.biref_Omega:
        v.witness = find_witness(phi, cap=witness_cap)
    return v


def find_witness(phi: Isometry, *, cap: int = 3**12):
    """Involutions (sigma, tau) in Omega with phi = sigma tau, or None if the
    reverser enumeration is over the cap."""
    F = phi.field
    S = phi.space
    n = phi.dim
    try:
        R = reversers(phi, max_results=cap)
    except CentralizerTooLarge:
        return None
    sq = matmul(F, R, R)
    inv = R[(sq == eye(n)).all(axis=(1, 2))]
    for sig in inv:
        s = Isometry(S, sig, validate=False)
        if s.det != 1 or s.spinor_norm is not SQUARE:
            continue
        tau = matmul(F, sig, phi.matrix)
        # phi = sigma tau as maps: x phi = (x sigma) tau
        return sig, tau
    raise TheoremViolation("biref_Omega predicted but no involution in Omega reverses phi")


def check_eta_reversal(phi: Isometry, eta: Isometry, *, assume_in_omega: bool | None = None) -> Verdict:
    """An eta with eta^2 = -1 reversing phi forces phi to be bireflectional in Omega."""
    F = phi.field
    n = phi.dim
    if not (matmul(F, eta.matrix, eta.matrix) == scalar(F, F.minus_one, n)).all():
        raise EtaSquareNotMinusOne("eta^2 != -1")
    lhs = matmul(F, matmul(F, eta.inverse().matrix, phi.matrix), eta.matrix)
    if not (lhs == phi.inverse().matrix).all():
        raise NotAReversal("eta^-1 phi eta != phi^-1")
    v = classify(phi, assume_in_omega=assume_in_omega)
    if not v.in_omega:
        raise NotInOmega("phi is not in Omega(V)")
    if not v.biref_Omega:
        raise TheoremViolation("phi is reversed by eta with eta^2 = -1 but predicted not bireflectional")
    return v


# ---------------------------------------------------------------- special linear group

SL_READINGS = ("nonsquare-polynomial", "odd-multiplicity")
DEFAULT_SL_READING = "nonsquare-polynomial"


def _sl_profile(F: Field, M) -> EDProfile:
    M = np.asarray(M, dtype=np.int64)
    if det(F, M) != 1:
        raise NotSL("det != 1")
    ed = elementary_divisors(F, M)
    if not ed.is_selfreciprocal():
        raise NotReversibleInGL("M is not similar to its inverse")
    return ed


def sl_biref(F: Field, M) -> bool:
    ed = _sl_profile(F, M)
    n = np.asarray(M).shape[0]
    return n % 4 != 2 or _has_odd_pm(ed, F)


def sl_reversible(F: Field, M, reading: str = DEFAULT_SL_READING) -> bool:
    """Reversibility in SL(V) for dim = 2 mod 4.

    "nonsquare-polynomial": some elementary divisor p^d is not the square of a
    polynomial, i.e. d is odd.  "odd-multiplicity": some p^d with d odd occurs
    an odd number of times.
    """
    M = np.asarray(M, dtype=np.int64)
    ed = _sl_profile(F, M)
    if M.shape[0] % 4 != 2:
        raise WrongDimensionClass("the reversibility criterion is stated for dim = 2 mod 4")
    if F.q % 4 == 1:
        return True
    if reading == "nonsquare-polynomial":
        return any(d % 2 for _, d, _ in ed.entries)
    if reading == "odd-multiplicity":
        return any(d % 2 and m % 2 for _, d, m in ed.entries)
    raise ValueError(f"unknown reading {reading!r}")

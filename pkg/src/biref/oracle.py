"""Brute-force ground truth.

Small orthogonal groups are enumerated completely from reflections; larger
ones are probed one element at a time through the centraliser coset
Cent(phi) rho_0 of reversing elements.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import NONSQUARE, SQUARE, Field, Poly, SquareClass, class_of_minus_one, field_make, irreducible_polys, poly_reciprocal, square_class
from .classify import (
    DEFAULT_SL_READING,
    _is_pm_one,
    classify,
    condition_c2,
    n_counts,
    sl_biref,
    sl_reversible,
)
from .errors import (
    CentralizerTooLarge,
    GroupTooLarge,
    NotReversibleInGL,
    TheoremViolation,
    UnknownSuite,
)
from .linalg import (
    Subspace,
    block_diag,
    centralizer_basis,
    companion,
    det,
    elementary_divisors,
    eye,
    image,
    inverse,
    kernel,
    matmul,
    restrict,
    scalar,
    transpose,
)
from .ortho import (
    BlockSpec,
    Isometry,
    build_block,
    build_from_specs,
    centralizer,
    homogeneous_disc,
    orthogonal_decompose,
    reflection_matrix,
    reversers,
    spinor_norm,
)
from .space import BilinearSpace, discriminant, gram_class, induced_form, vectors, witt_index

DEFAULT_GROUP_CAP = 2_000_000
DEFAULT_CENTRALIZER_DIM_CAP = 24


# ---------------------------------------------------------------- orders


def order_O(q: int, n: int, disc: SquareClass) -> int:
    """|O(V)| for the n-dimensional space of discriminant ``disc`` over GF(q)."""
    if n == 0:
        return 1
    if n % 2:
        m = (n - 1) // 2
        return 2 * q ** (m * m) * math.prod(q ** (2 * i) - 1 for i in range(1, m + 1))
    m = n // 2
    # hyperbolic iff disc = class((-1)^m)
    minus = SQUARE if q % 4 == 1 else NONSQUARE
    plus_disc = minus if m % 2 else SQUARE
    sign = 1 if disc is plus_disc else -1
    return 2 * q ** (m * (m - 1)) * (q**m - sign) * math.prod(q ** (2 * i) - 1 for i in range(1, m))


# ---------------------------------------------------------------- keys and closure


class _Keyer:
    """Hashable keys for batches of n x n matrices over GF(q)."""

    def __init__(self, q: int, n: int):
        self.n = n
        self.small = q ** (n * n) < 2**62
        if self.small:
            self.w = np.array([q**i for i in range(n * n)], dtype=np.int64)

    def keys(self, X: np.ndarray) -> list:
        flat = X.reshape(X.shape[0], -1)
        if self.small:
            return (flat @ self.w).tolist()
        b = np.ascontiguousarray(flat.astype(np.uint8))
        return [r.tobytes() for r in b]


def close(
    F: Field,
    gens: list[np.ndarray],
    gen_labels: list[tuple[int, int]] | None = None,
    *,
    cap: int = DEFAULT_GROUP_CAP,
):
    """Breadth-first closure of <gens>.

    Labels are (det sign, spinor sign) pairs propagated along right
    multiplication; a conflict means the labelling is not a homomorphism and
    raises TheoremViolation.  Returns (elements, labels, key->index).
    """
    n = gens[0].shape[0] if gens else 0
    keyer = _Keyer(F.q, n)
    one = eye(n)[None]
    E = [one]
    L = [np.ones((1, 2), dtype=np.int64)]
    index = {keyer.keys(one)[0]: 0}
    count = 1
    glab = [np.asarray(l, dtype=np.int64) for l in (gen_labels or [(1, 1)] * len(gens))]
    X, XL = one, L[0]
    while X.shape[0]:
        newE, newL = [], []
        for g, gl in zip(gens, glab):
            P = matmul(F, X, g[None])
            PL = XL * gl
            base = count
            idx = np.empty(P.shape[0], dtype=np.int64)
            for i, k in enumerate(keyer.keys(P)):
                j = index.get(k)
                if j is None:
                    j = index[k] = count
                    count += 1
                idx[i] = j
            fresh = idx >= base
            old = ~fresh
            if gen_labels is not None and old.any():
                if (np.concatenate(L)[idx[old]] != PL[old]).any():
                    raise TheoremViolation("det/spinor labels are inconsistent along the closure")
            if fresh.any():
                E.append(P[fresh])
                L.append(PL[fresh])
                newE.append(P[fresh])
                newL.append(PL[fresh])
            if count > cap:
                raise GroupTooLarge(f"closure exceeds {cap} elements")
        if not newE:
            break
        X, XL = np.concatenate(newE), np.concatenate(newL)
    return np.concatenate(E), np.concatenate(L), index


@dataclass
class GroupTable:
    space: BilinearSpace
    elements: np.ndarray  # (N, n, n)
    det_sign: np.ndarray  # +-1
    theta_sign: np.ndarray  # +-1 (square = +1)
    generators: list[np.ndarray]
    index: dict
    keyer: _Keyer
    classes: np.ndarray | None = None  # class label per element
    omega_mask: np.ndarray | None = None

    @property
    def order(self) -> int:
        return self.elements.shape[0]

    @property
    def field(self) -> Field:
        return self.space.field

    def lookup(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.index.get(k, -1) for k in self.keyer.keys(X)], dtype=np.int64)

    @property
    def so_mask(self) -> np.ndarray:
        return self.det_sign == 1

    @property
    def ker_theta_mask(self) -> np.ndarray:
        return self.so_mask & (self.theta_sign == 1)

    def class_reps(self) -> list[int]:
        labs = self.classes
        _, first = np.unique(labs, return_index=True)
        return sorted(first.tolist())

    def class_size(self, i: int) -> int:
        return int((self.classes == self.classes[i]).sum())


def all_reflections(S: BilinearSpace) -> list[np.ndarray]:
    F = S.field
    V = vectors(F, S.dim)[1:]
    out, seen = [], set()
    for v in V:
        if S.q(v) == 0:
            continue
        R = reflection_matrix(S, v)
        k = R.tobytes()
        if k not in seen:
            seen.add(k)
            out.append((R, square_class(F, S.q(v))))
    return out


def closure(S: BilinearSpace, *, cap: int = DEFAULT_GROUP_CAP, classes: bool = True) -> GroupTable:
    """All of O(V), generated by reflections chosen greedily until every
    reflection lies in the closure.  det and spinor labels are propagated and
    checked for consistency on every edge."""
    F = S.field
    n = S.dim
    expected = order_O(F.q, n, discriminant(S))
    if expected > cap:
        raise GroupTooLarge(f"|O(V)| = {expected} exceeds cap {cap}")
    refl = all_reflections(S)
    gens, labels = [], []
    keyer = _Keyer(F.q, n)
    index = {keyer.keys(eye(n)[None])[0]: 0}
    E = eye(n)[None]
    L = np.ones((1, 2), dtype=np.int64)
    for R, cls in refl:
        if keyer.keys(R[None])[0] in index:
            continue
        gens.append(R)
        labels.append((-1, 1 if cls is SQUARE else -1))
        E, L, index = close(F, gens, labels, cap=cap)
    T = GroupTable(S, E, L[:, 0], L[:, 1], gens, index, keyer)
    if classes:
        T.classes = conjugacy_classes(T)
    return T


def _perm(T: GroupTable, g: np.ndarray) -> np.ndarray:
    F = T.field
    gi = inverse(F, g)
    C = matmul(F, matmul(F, gi[None], T.elements), g[None])
    return T.lookup(C)


def conjugacy_classes(T: GroupTable) -> np.ndarray:
    """Orbit labels of O(V) acting on itself by conjugation (min index per orbit)."""
    perms = [_perm(T, g) for g in T.generators]
    lab = np.arange(T.order)
    while True:
        old = lab
        for p in perms:
            lab = np.minimum(lab, lab[p])
            inv = np.empty_like(p)
            inv[p] = np.arange(p.size)
            lab = np.minimum(lab, lab[inv])
        # pointer jumping
        lab = lab[lab]
        if (lab == old).all():
            return lab


def commutator_subgroup(T: GroupTable) -> np.ndarray:
    """Boolean mask of [O, O]: normal closure of the commutators of the generators."""
    F = T.field
    n = T.space.dim
    gens = T.generators
    comms = []
    for a, b in itertools.combinations(gens, 2):
        c = matmul(F, matmul(F, matmul(F, a, b), a), b)  # a^-1 = a for reflections
        comms.append(c)
    if not comms:
        mask = np.zeros(T.order, dtype=bool)
        mask[0] = True
        return mask
    mask = np.zeros(T.order, dtype=bool)
    mask[0] = True
    H: list[np.ndarray] = []
    queue = list(comms)
    while queue:
        c = queue.pop()
        if mask[T.lookup(c[None])[0]]:
            continue
        H.append(c)
        E, _, _ = close(F, H)
        mask[:] = False
        mask[T.lookup(E)] = True
        # reflections are their own inverses
        queue.extend(matmul(F, matmul(F, g, h), g) for h in H for g in gens)
    return mask


# ---------------------------------------------------------------- certificates


@dataclass
class ElementCertificate:
    matrix: np.ndarray
    biref_O: bool
    biref_SO: bool | None
    biref_Omega: bool | None
    reversible_Omega: bool | None
    method: str
    reversers: int
    involutive_reversers: int
    centralizer_order: int | None = None
    class_size: int | None = None

    def flags(self) -> dict:
        return {
            "biref_O": self.biref_O,
            "biref_SO": self.biref_SO,
            "biref_Omega": self.biref_Omega,
            "reversible_Omega": self.reversible_Omega,
        }

    def to_json(self) -> dict:
        out = {"matrix": self.matrix.tolist(), "method": self.method, **self.flags()}
        out.update(reversers=self.reversers, involutive_reversers=self.involutive_reversers)
        if self.centralizer_order is not None:
            out["centralizer_order"] = self.centralizer_order
        if self.class_size is not None:
            out["class_size"] = self.class_size
        return out


def _flags_from(inv, det_s, theta_s, in_so: bool, in_om: bool | None):
    so = det_s == 1
    om = so & (theta_s == 1)
    return dict(
        biref_O=bool(inv.any()),
        biref_SO=bool((inv & so).any()) if in_so else None,
        biref_Omega=bool((inv & om).any()) if in_om else None,
        reversible_Omega=bool(om.any()) if in_om else None,
    )


def exhaustive_classify(T: GroupTable, omega_mask: np.ndarray | None = None) -> list[ElementCertificate]:
    """Brute-force flags for one representative of each O-conjugacy class.

    Omega and SO are normal in O, so the flags are constant on O-classes.
    The Omega used here is ``omega_mask`` (commutator closure) when given.
    """
    F = T.field
    n = T.space.dim
    Es = T.elements
    sq = matmul(F, Es, Es)
    invol = (sq == eye(n)).all(axis=(1, 2))
    om = omega_mask if omega_mask is not None else T.ker_theta_mask
    so = T.so_mask
    out = []
    for i in T.class_reps():
        phi = Es[i]
        phinv = inverse(F, phi)
        lhs = matmul(F, phi[None], Es)
        rhs = matmul(F, Es, phinv[None])
        rev = (lhs == rhs).all(axis=(1, 2))
        inv = rev & invol
        flags = dict(
            biref_O=bool(inv.any()),
            biref_SO=bool((inv & so).any()) if so[i] else None,
            biref_Omega=bool((inv & om).any()) if om[i] else None,
            reversible_Omega=bool((rev & om).any()) if om[i] else None,
        )
        out.append(
            ElementCertificate(
                phi, method="exhaustive", reversers=int(rev.sum()), involutive_reversers=int(inv.sum()),
                class_size=T.class_size(i), **flags,
            )
        )
    return out


def _labels_by_closure(S: BilinearSpace, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """det and spinor signs of every element of the group C (as an array),
    via a closure from greedily chosen generators."""
    F = S.field
    keyer = _Keyer(F.q, S.dim)
    keys = keyer.keys(C)
    gens, labs = [], []
    index = {keyer.keys(eye(S.dim)[None])[0]: 0}
    E, L = eye(S.dim)[None], np.ones((1, 2), dtype=np.int64)
    for k, c in zip(keys, C):
        if k in index:
            continue
        g = Isometry(S, c, validate=False)
        gens.append(c)
        labs.append((1 if g.det == 1 else -1, 1 if g.spinor_norm is SQUARE else -1))
        E, L, index = close(F, gens, labs, cap=len(keys) + 1)
    if len(index) != len(keys):
        raise TheoremViolation("centraliser is not closed under multiplication")
    idx = np.array([index[k] for k in keys])
    return L[idx, 0], L[idx, 1]


def element_certificate(
    phi: Isometry,
    *,
    cap_dim: int = DEFAULT_CENTRALIZER_DIM_CAP,
    max_results: int = 2_000_000,
    in_omega_known: bool | None = None,
) -> ElementCertificate:
    """Exact flags for phi from the reverser coset Cent_O(phi) rho_0."""
    S = phi.space
    F = S.field
    n = S.dim
    cdim = len(centralizer_basis(F, phi.matrix))
    if cdim > cap_dim:
        raise CentralizerTooLarge(f"centraliser algebra has dimension {cdim} > {cap_dim}")
    C = centralizer(phi, max_results=max_results)
    rho = reversers(phi, first=True, max_results=max_results)
    if rho.shape[0] == 0:
        raise TheoremViolation("no element of O(V) reverses phi")
    rho0 = Isometry(S, rho[0], validate=False)
    cd, ct = _labels_by_closure(S, C)
    r_det = 1 if rho0.det == 1 else -1
    r_th = 1 if rho0.spinor_norm is SQUARE else -1
    R = matmul(F, C, rho0.matrix[None])
    inv = (matmul(F, R, R) == eye(n)).all(axis=(1, 2))
    det_s, th_s = cd * r_det, ct * r_th
    in_so = phi.det == 1
    if in_omega_known is not None:
        in_om = in_omega_known
    else:
        in_om = in_so and phi.spinor_norm is SQUARE
        if witt_index(S) == 0:
            in_om = None
    flags = _flags_from(inv, det_s, th_s, in_so, in_om)
    return ElementCertificate(
        phi.matrix, method="centralizer-coset", reversers=int(R.shape[0]),
        involutive_reversers=int(inv.sum()), centralizer_order=int(C.shape[0]), **flags,
    )


# ---------------------------------------------------------------- exhaustive cells


@dataclass
class CellReport:
    q: int
    dim: int
    disc: SquareClass
    order: int
    expected_order: int
    witt_index: int
    omega_order: int
    omega_matches_kernel: bool | None
    classes: list[dict] = dc_field(default_factory=list)
    mismatches: int = 0
    all_biref_Omega: bool = True

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "dim": self.dim,
            "disc": self.disc.name.lower(),
            "order": self.order,
            "expected_order": self.expected_order,
            "witt_index": self.witt_index,
            "omega_order": self.omega_order,
            "omega_matches_kernel": self.omega_matches_kernel,
            "classes": self.classes,
            "mismatches": self.mismatches,
            "all_biref_Omega": self.all_biref_Omega,
            "status": "match" if self.mismatches == 0 and self.order == self.expected_order
            and self.omega_matches_kernel is not False else "mismatch",
        }


FLAG_NAMES = ("biref_SO", "biref_Omega", "reversible_Omega")


def verify_table(T: GroupTable) -> CellReport:
    """Compare classify verdicts against brute force on every O-class."""
    S = T.space
    F = S.field
    wind = witt_index(S)
    omega = commutator_subgroup(T)
    kern = T.ker_theta_mask
    matches = bool((omega == kern).all()) if wind >= 1 else None
    rep = CellReport(
        F.q, S.dim, discriminant(S), T.order, order_O(F.q, S.dim, discriminant(S)), wind,
        int(omega.sum()), matches,
    )
    for cert in exhaustive_classify(T, omega):
        phi = Isometry(S, cert.matrix, validate=False)
        i = T.lookup(cert.matrix[None])[0]
        row = {"representative": cert.matrix.tolist(), "class_size": cert.class_size, "oracle": cert.flags()}
        if T.det_sign[i] == 1:
            v = classify(phi, assume_in_omega=bool(omega[i]) if wind == 0 else None)
            if wind >= 1 and v.in_omega != bool(omega[i]):
                row["match"] = False
                rep.mismatches += 1
                rep.classes.append(row)
                continue
            pred = {k: getattr(v, k) for k in FLAG_NAMES}
            pred["biref_O"] = True
            row["classify"] = pred
            ok = all(pred[k] == cert.flags()[k] for k in ("biref_O",) + FLAG_NAMES)
        else:
            row["classify"] = {"biref_O": True}
            ok = cert.biref_O
        row["match"] = ok
        if not ok:
            rep.mismatches += 1
        if omega[i] and not cert.biref_Omega:
            rep.all_biref_Omega = False
        rep.classes.append(row)
    return rep


def involution_theta_check(T: GroupTable) -> int:
    """Count involutions whose spinor label differs from disc Bahn(sigma)."""
    F = T.field
    S = T.space
    n = S.dim
    sq = matmul(F, T.elements, T.elements)
    bad = 0
    for i in np.flatnonzero((sq == eye(n)).all(axis=(1, 2))):
        sig = T.elements[i]
        B = image(F, F.sub[sig, eye(n)])
        cls = gram_class(F, S.gram_of(B))
        if (1 if cls is SQUARE else -1) != T.theta_sign[i]:
            bad += 1
    return bad


# ---------------------------------------------------------------- SL(2, q) and GL helpers


def special_linear_group(F: Field, n: int) -> np.ndarray:
    """All of SL(n, q) by enumeration (tiny n only)."""
    allm = vectors(F, n * n).reshape(-1, n, n)
    dets = np.array([det(F, M) for M in allm])
    return allm[dets == 1]


def sl_exhaustive(F: Field, n: int = 2, reading: str = DEFAULT_SL_READING) -> list[dict]:
    """Brute-force biref/reversible in SL(n, q) per class, next to the predicates."""
    G = special_linear_group(F, n)
    keyer = _Keyer(F.q, n)
    index = {k: i for i, k in enumerate(keyer.keys(G))}
    Ginv = np.array([inverse(F, g) for g in G])
    lab = np.arange(G.shape[0])
    # conjugacy classes by full conjugation (group is tiny)
    seen = np.zeros(G.shape[0], dtype=bool)
    out = []
    invol = (matmul(F, G, G) == eye(n)).all(axis=(1, 2))
    for i in range(G.shape[0]):
        if seen[i]:
            continue
        conj = matmul(F, matmul(F, Ginv, G[i][None]), G)
        members = np.array([index[k] for k in keyer.keys(conj)])
        seen[members] = True
        phi = G[i]
        phinv = Ginv[i]
        rev = (matmul(F, phi[None], G) == matmul(F, G, phinv[None])).all(axis=(1, 2))
        gl_rev = elementary_divisors(F, phi).is_selfreciprocal()
        row = {
            "matrix": phi.tolist(),
            "class_size": int(np.unique(members).size),
            "reversible": bool(rev.any()),
            "biref": bool((rev & invol).any()),
            "gl_reversible": gl_rev,
        }
        if gl_rev:
            row["pred_biref"] = sl_biref(F, phi)
            if n % 4 == 2:
                row["pred_reversible"] = sl_reversible(F, phi, reading)
        out.append(row)
    return out


def gl_reversing_involutions(F: Field, M: np.ndarray, *, max_space: int = 3**10) -> np.ndarray:
    """All involutions X in GL with M X = X M^{-1}."""
    n = M.shape[0]
    K = _solution_space(F, M, inverse(F, M))
    if F.q ** K.shape[0] > max_space:
        raise CentralizerTooLarge("reverser space too large")
    X = matmul(F, vectors(F, K.shape[0]), K).reshape(-1, n, n)
    inv = (matmul(F, X, X) == eye(n)).all(axis=(1, 2))
    return X[inv]


def _solution_space(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Basis (as flattened rows) of {X : A X = X B}."""
    n = A.shape[0]
    rows = []
    for a in range(n):
        for b in range(n):
            E = np.zeros((n, n), dtype=np.int64)
            E[a, b] = 1
            rows.append(F.sub[matmul(F, A, E), matmul(F, E, B)].ravel())
    return kernel(F, np.array(rows))


def sl_reversible_by_cosets(F: Field, M: np.ndarray, *, max_space: int = 3**10) -> bool:
    """Is M conjugate to M^{-1} by an element of SL?

    The GL-reversers form the coset C_GL(M) X0, so the answer is yes iff
    det(X0)^{-1} is the determinant of some unit of the centraliser algebra.
    """
    n = M.shape[0]
    Minv = inverse(F, M)
    R = _solution_space(F, M, Minv)
    C = _solution_space(F, M, M)
    if F.q ** max(R.shape[0], C.shape[0]) > max_space:
        raise CentralizerTooLarge("centraliser too large to enumerate")
    d0 = None
    for c in vectors(F, R.shape[0])[1:]:
        d = det(F, matmul(F, c[None], R).reshape(n, n))
        if d:
            d0 = d
            break
    if d0 is None:
        raise NotReversibleInGL("M is not similar to its inverse")
    target = int(F.inv[d0])
    seen = set()
    for c in vectors(F, C.shape[0])[1:]:
        d = det(F, matmul(F, c[None], C).reshape(n, n))
        if d == target:
            return True
        if d:
            seen.add(d)
            if len(seen) == F.q - 1:
                break
    return target in seen


SL_READINGS = ("nonsquare-polynomial", "odd-multiplicity")


def sl_reading_check(F: Field, n: int, samples: int, rng: random.Random, *, max_space: int = 3**8) -> dict:
    """Random SL(n, q) elements similar to their inverses: both readings of the
    reversibility criterion against the coset oracle.  Elements whose
    centraliser is over ``max_space`` are skipped and counted."""
    profiles = []
    for prof in selfreciprocal_profiles(F, n):
        if det(F, rational_form(F, prof)) == 1:
            profiles.append(prof)
    mismatches = {r: 0 for r in SL_READINGS}
    inst = skipped = 0
    for _ in range(samples):
        prof = profiles[rng.randrange(len(profiles))]
        A = random_gl(F, n, rng)
        M = matmul(F, matmul(F, inverse(F, A), rational_form(F, prof)), A)
        try:
            truth = sl_reversible_by_cosets(F, M, max_space=max_space)
        except CentralizerTooLarge:
            skipped += 1
            continue
        inst += 1
        for r in SL_READINGS:
            mismatches[r] += sl_reversible(F, M, r) != truth
    return {"instances": inst, "skipped": skipped, "mismatches": mismatches}


def random_gl(F: Field, n: int, rng: random.Random) -> np.ndarray:
    while True:
        A = np.array([[rng.randrange(F.q) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if det(F, A):
            return A


def selfreciprocal_profiles(F: Field, n: int, *, odd_pm: bool = True):
    """ED multisets of invertible n x n matrices similar to their inverses.

    Each profile is a list of (p, d).  With ``odd_pm=False`` profiles containing
    (x +- 1)^d with d odd are skipped.
    """
    prims = []
    for deg in range(1, n + 1):
        for p in irreducible_polys(F, deg):
            if p.coeffs[0] != 0:
                prims.append(p)
    # units of the profile: a selfreciprocal p^d, or a pair p^d + p*^d
    units = []
    for p in prims:
        ps = poly_reciprocal(p)
        for d in range(1, n // p.degree + 1):
            if p == ps:
                if not odd_pm and _is_pm_one(F, p) and d % 2:
                    continue
                units.append(((p, d),))
            elif p < ps:
                if 2 * p.degree * d <= n:
                    units.append(((p, d), (ps, d)))

    def size(u):
        return sum(p.degree * d for p, d in u)

    out = []

    def rec(start, left, acc):
        if left == 0:
            out.append([pd for u in acc for pd in u])
            return
        for i in range(start, len(units)):
            s = size(units[i])
            if s <= left:
                rec(i, left - s, acc + [units[i]])

    rec(0, n, [])
    return out


def rational_form(F: Field, profile) -> np.ndarray:
    return block_diag(*[companion(p**d) for p, d in profile])


def cor53_check(F: Field, n: int, samples: int, rng: random.Random) -> dict:
    """Reversing involutions of bireflectional GL-elements without odd +-1
    blocks have dim Fix = dim Neg = n / 2."""
    profiles = selfreciprocal_profiles(F, n, odd_pm=False)
    checked = violations = with_invol = 0
    for _ in range(samples):
        prof = profiles[rng.randrange(len(profiles))]
        A = random_gl(F, n, rng)
        M = matmul(F, matmul(F, inverse(F, A), rational_form(F, prof)), A)
        invs = gl_reversing_involutions(F, M)
        checked += 1
        if invs.shape[0]:
            with_invol += 1
        for X in invs:
            fix = kernel(F, F.sub[X, eye(n)]).shape[0]
            neg = kernel(F, F.add[X, eye(n)]).shape[0]
            if fix != n // 2 or neg != n // 2:
                violations += 1
    return {"instances": checked, "bireflectional": with_invol, "violations": violations}


# ---------------------------------------------------------------- property suites


def _reversing_involutions(phi: Isometry) -> list[Isometry]:
    R = reversers(phi)
    F = phi.field
    n = phi.dim
    inv = (matmul(F, R, R) == eye(n)).all(axis=(1, 2))
    return [Isometry(phi.space, X, validate=False) for X in R[inv]]


def suite_lemma_inv2() -> dict:
    """Cyclic (x-1)^{2m+1}: Theta of a reversing involution lies in
    {(-1)^t, (-1)^t disc V} with t = floor((m+1)/2)."""
    F = field_make(3)
    minus = class_of_minus_one(F)
    inst = viol = 0
    for m in (1, 2, 3):
        t = (m + 1) // 2
        for disc in (SQUARE, NONSQUARE):
            S, phi = build_block(F, BlockSpec("type2pm", 1, m, disc))
            base = minus if t % 2 else SQUARE
            allowed = {base, base * disc}
            for sig in _reversing_involutions(phi):
                inst += 1
                if sig.spinor_norm not in allowed:
                    viol += 1
    return {"instances": inst, "violations": viol}


def _inv3_blocks():
    F3, F5 = field_make(3), field_make(5)
    yield F3, BlockSpec("type1", eps=1, m=2)
    yield F3, BlockSpec("type1", eps=-1, m=2)
    yield F5, BlockSpec("type1", eps=1, m=2)
    yield F3, BlockSpec("type2", poly=(1, 0, 1), d=2)
    yield F5, BlockSpec("type3", poly=(3, 1), d=2)  # (x - 2)^2 paired with (x - 3)^2


def suite_lemma_inv3() -> dict:
    """Types 1, 2e, 3e: reversing involutions have Theta = class((-1)^{dim/4})."""
    inst = viol = 0
    for F, spec in _inv3_blocks():
        S, phi = build_block(F, spec)
        want = class_of_minus_one(F) if (S.dim // 4) % 2 else SQUARE
        for sig in _reversing_involutions(phi):
            inst += 1
            if sig.spinor_norm is not want:
                viol += 1
    return {"instances": inst, "violations": viol}


def _inv4_blocks():
    F3, F5 = field_make(3), field_make(5)
    yield F3, BlockSpec("type2", poly=(1, 0, 1), d=1)
    yield F3, BlockSpec("type2", poly=(1, 0, 1), d=3)
    yield F3, BlockSpec("type2", poly=(1, 1, 1, 1, 1), d=1)
    yield F5, BlockSpec("type2", poly=(1, 1, 1), d=1)


def suite_lemma_inv4() -> dict:
    """Type 2o: Witt index = dim/2 - 1."""
    inst = viol = 0
    for F, spec in _inv4_blocks():
        S, phi = build_block(F, spec)
        inst += 1
        if witt_index(S) != S.dim // 2 - 1:
            viol += 1
    return {"instances": inst, "violations": viol}


def lemma_disc_holds(phi: Isometry, B: np.ndarray) -> bool:
    """On a type 2- summand with basis B: disc U = -disc(Bahn/Fix)."""
    F = phi.field
    R = restrict(F, phi.matrix, B)
    k = B.shape[0]
    SU = BilinearSpace(F, phi.space.gram_of(B))
    A = F.sub[R, eye(k)]
    bahn = Subspace(F, image(F, A), k)
    fix = Subspace(F, kernel(F, A), k)
    Q = induced_form(SU, bahn, fix)
    return gram_class(F, SU.gram) is class_of_minus_one(F) * gram_class(F, Q.gram)


def suite_lemma_disc(phis=None) -> dict:
    """Every type 2- summand of dim >= 3 in the given (or default) elements."""
    if phis is None:
        phis = []
        for F in (field_make(3), field_make(5)):
            for t in (1, 2, 3):
                for disc in (SQUARE, NONSQUARE):
                    phis.append(build_block(F, BlockSpec("type2pm", 1, t, disc))[1])
            phis.append(build_from_specs(F, [BlockSpec("type2pm", 1, 1, SQUARE), BlockSpec("type2pm", 1, 1, NONSQUARE),
                                             BlockSpec("type2pm", 1, 0, SQUARE)])[1])
    inst = viol = 0
    for phi in phis:
        for s in orthogonal_decompose(phi).summands:
            if s.tag == "2-" and s.dim >= 3:
                inst += 1
                if not lemma_disc_holds(phi, s.basis):
                    viol += 1
    return {"instances": inst, "violations": viol}


def _end_profiles(F: Field, n: int):
    """ED multisets of all n x n matrices (p = x allowed)."""
    prims = [p for deg in range(1, n + 1) for p in irreducible_polys(F, deg)]
    units = [(p, d) for p in prims for d in range(1, n // p.degree + 1)]
    out = []

    def rec(start, left, acc):
        if left == 0:
            out.append(list(acc))
            return
        for i in range(start, len(units)):
            p, d = units[i]
            if p.degree * d <= left:
                rec(i, left - p.degree * d, acc + [units[i]])

    rec(0, n, [])
    return out


def suite_lemma_inv5(q: int = 3, max_dim: int = 4, exhaustive_limit: int = 3**9, samples: int = 3000) -> dict:
    """All elementary divisors are squares iff every invertible centraliser
    element has square determinant."""
    F = field_make(q)
    rng = random.Random(5)
    inst = viol = 0
    undecided = 0
    for n in range(1, max_dim + 1):
        for prof in _end_profiles(F, n):
            M = rational_form(F, prof)
            all_sq = all(d % 2 == 0 for _, d in prof)
            K = np.array([b.ravel() for b in centralizer_basis(F, M)])
            k = K.shape[0]
            if F.q**k <= exhaustive_limit:
                X = matmul(F, vectors(F, k), K).reshape(-1, n, n)
            else:
                X = matmul(F, np.array([[rng.randrange(F.q) for _ in range(k)] for _ in range(samples)]), K).reshape(-1, n, n)
            dets = [det(F, x) for x in X]
            nonsq = any(d and square_class(F, d) is NONSQUARE for d in dets)
            inst += 1
            if all_sq and nonsq:
                viol += 1
            elif not all_sq and not nonsq:
                if F.q**k <= exhaustive_limit:
                    viol += 1
                else:
                    undecided += 1
    return {"instances": inst, "violations": viol, "undecided": undecided}


def _p1_instances():
    F = field_make(3)
    shapes = [(1, 1, 1), (3, 1), (3, 3), (5, 1), (1, 1, 1, 1), (3, 1, 1), (5, 3)]
    for shape in shapes:
        for disc in (SQUARE, NONSQUARE):
            specs = [BlockSpec("type2pm", 1, (s - 1) // 2, disc) for s in shape]
            yield build_from_specs(F, specs)


def suite_lemma_p1() -> dict:
    """Homodisc unipotent phi in Omega: involutions in SO reversing phi have
    Theta = (-1)^{n_3 + n_5}.

    Homodisc means every orthogonal decomposition has equal summand discs,
    i.e. C2 fails; equal discs in one decomposition is not enough (the
    identity on diag(1,1,1) over GF(3) is reversed by -1 on a plane of disc -1).
    """
    inst = viol = 0
    for S, phi in _p1_instances():
        if witt_index(S) == 0 or phi.det != 1 or phi.spinor_norm is not SQUARE:
            continue
        if condition_c2(phi):
            continue
        c = n_counts(phi)
        F = S.field
        want = class_of_minus_one(F) if (c[3] + c[5]) % 2 else SQUARE
        for sig in _reversing_involutions(phi):
            if sig.det != 1:
                continue
            inst += 1
            if sig.spinor_norm is not want:
                viol += 1
    return {"instances": inst, "violations": viol}


def suite_lemma_p3c() -> dict:
    """Bicyclic (x -+ 1)^{2m+1} pair with disc V = 1: reversers realise
    (det, Theta) = (1, 1), (-1, 1), (-1, -1) by involutions and (1, -1) by some element."""
    F = field_make(3)
    inst = viol = 0
    for m in (0, 1):
        for eps in (1, -1):
            for disc in (SQUARE, NONSQUARE):
                specs = [BlockSpec("type2pm", eps, m, disc)] * 2
                S, phi = build_from_specs(F, specs)
                R = reversers(phi)
                n = S.dim
                inv = (matmul(F, R, R) == eye(n)).all(axis=(1, 2))
                got_inv, got_any = set(), set()
                for X, isinv in zip(R, inv):
                    g = Isometry(S, X, validate=False)
                    key = (g.det == 1, g.spinor_norm is SQUARE)
                    got_any.add(key)
                    if isinv:
                        got_inv.add(key)
                inst += 1
                need_inv = {(True, True), (False, True), (False, False)}
                if not need_inv <= got_inv or (True, False) not in got_any:
                    viol += 1
    return {"instances": inst, "violations": viol}


def suite_remark_43(samples: int = 40, seed: int = 43) -> dict:
    """Homogeneous discriminants: intrinsic formula (with disc, not dim) equals
    the product of summand discriminants of an explicit decomposition, and for a
    multiplicity-one block equals the discriminant of that block."""
    from .ortho import random_isometry

    rng = random.Random(seed)
    inst = viol = 0
    configs = []
    for q in (3, 5):
        F = field_make(q)
        for specs in (
            [("type2pm", 1, 1, SQUARE), ("type2pm", 1, 0, NONSQUARE)],
            [("type2pm", 1, 1, NONSQUARE), ("type2pm", 1, 1, NONSQUARE)],
            [("type2pm", -1, 1, SQUARE), ("type2pm", 1, 2, NONSQUARE)],
            [("type2pm", 1, 2, SQUARE), ("type2pm", 1, 0, SQUARE), ("type2pm", 1, 0, NONSQUARE)],
        ):
            configs.append((F, [BlockSpec(*s) for s in specs]))
    for F, specs in configs:
        S, phi = build_from_specs(F, specs)
        for _ in range(samples // len(configs) + 1):
            g = random_isometry(S, rng)
            psi = Isometry(S, matmul(F, matmul(F, g.inverse().matrix, phi.matrix), g.matrix), validate=False)
            summ = orthogonal_decompose(psi)
            for (eps, s), (m, D) in summ.homogeneous.items():
                inst += 1
                mi, Di = homogeneous_disc(psi, eps, s)
                if (mi, Di) != (m, D):
                    viol += 1
    return {"instances": inst, "violations": viol}


def suite_cor_53(samples: int = 500, seed: int = 53) -> dict:
    return cor53_check(field_make(3), 4, samples, random.Random(seed))


SUITES = {
    "lemma-inv2": suite_lemma_inv2,
    "lemma-inv3": suite_lemma_inv3,
    "lemma-inv4": suite_lemma_inv4,
    "lemma-disc": suite_lemma_disc,
    "lemma-inv5": suite_lemma_inv5,
    "lemma-p1": suite_lemma_p1,
    "lemma-p3c": suite_lemma_p3c,
    "remark-4.3": suite_remark_43,
    "cor-5.3": suite_cor_53,
}


def property_suite(name: str) -> dict:
    try:
        fn = SUITES[name]
    except KeyError:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(SUITES)}") from None
    rep = fn()
    rep["suite"] = name
    return rep

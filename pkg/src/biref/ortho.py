"""Isometries: reflections, spinor norm, Omega membership, canonical blocks,
orthogonal decomposition into indecomposables, and an intertwiner search.

Maps act on row vectors, v -> v M, and M is an isometry iff M G M^T = G.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import NONSQUARE, SQUARE, Field, Poly, SquareClass, class_of_minus_one, field_make, poly_factor, poly_reciprocal, square_class
from .errors import (
    AnisotropicSmallSpace,
    BadSpec,
    DegenerateSubspace,
    DimensionMismatch,
    Inconsistent,
    InternalDecompositionFailure,
    IsotropicVector,
    NotAnIsometry,
    CentralizerTooLarge,
)
from .linalg import (
    EDProfile,
    Subspace,
    asmat,
    block_diag,
    companion,
    contragredient,
    cyclic_basis,
    cyclic_decomposition,
    det,
    elementary_divisors,
    eye,
    image,
    inverse,
    jordan_block,
    kernel,
    matmul,
    min_poly,
    mpow,
    msub,
    poly_eval_mat,
    primary_component,
    rank,
    restrict,
    scalar,
    solve,
    transpose,
    zeros,
)
from .space import BilinearSpace, anisotropic_vector, gram_class, induced_form, invariant_form_for, vectors, witt_index


def is_isometry(S: BilinearSpace, M) -> bool:
    M = np.asarray(M, dtype=np.int64)
    if M.shape != (S.dim, S.dim):
        return False
    F = S.field
    return bool((matmul(F, matmul(F, M, S.gram), transpose(M)) == S.gram).all())


class Isometry:
    """An element of O(V) together with its space."""

    def __init__(self, space: BilinearSpace, matrix, *, validate: bool = True):
        self.space = space
        M = np.asarray(matrix, dtype=np.int64)
        if M.shape != (space.dim, space.dim):
            raise DimensionMismatch(f"matrix shape {M.shape} does not match dim {space.dim}")
        if validate and not is_isometry(space, M):
            raise NotAnIsometry("M G M^T != G")
        self.matrix = M
        self.matrix.setflags(write=False)
        self._theta = None
        self._det = None

    @property
    def field(self) -> Field:
        return self.space.field

    @property
    def dim(self) -> int:
        return self.space.dim

    def __repr__(self):
        return f"Isometry({self.matrix.tolist()})"

    def __eq__(self, other):
        return isinstance(other, Isometry) and self.space == other.space and bool((self.matrix == other.matrix).all())

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def __matmul__(self, other: "Isometry") -> "Isometry":
        """self @ other: first self, then other."""
        return Isometry(self.space, matmul(self.field, self.matrix, other.matrix), validate=False)

    def inverse(self) -> "Isometry":
        # M^{-1} = G M^T G^{-1}
        F = self.field
        G = self.space.gram
        return Isometry(self.space, matmul(F, matmul(F, G, transpose(self.matrix)), inverse(F, G)), validate=False)

    def power(self, e: int) -> "Isometry":
        return Isometry(self.space, mpow(self.field, self.matrix, e), validate=False)

    def is_identity(self) -> bool:
        return bool((self.matrix == eye(self.dim)).all())

    def is_involution(self) -> bool:
        return bool((matmul(self.field, self.matrix, self.matrix) == eye(self.dim)).all())

    @property
    def det(self) -> int:
        if self._det is None:
            self._det = det(self.field, self.matrix)
        return self._det

    @property
    def spinor_norm(self) -> SquareClass:
        if self._theta is None:
            self._theta = spinor_norm(self)
        return self._theta

    def elementary_divisors(self) -> EDProfile:
        return elementary_divisors(self.field, self.matrix)


def identity(S: BilinearSpace) -> Isometry:
    return Isometry(S, eye(S.dim), validate=False)


def minus_identity(S: BilinearSpace) -> Isometry:
    return Isometry(S, scalar(S.field, S.field.minus_one, S.dim), validate=False)


def reflection_matrix(S: BilinearSpace, v) -> np.ndarray:
    """sigma_v(x) = x - 2 f(x, v)/f(v, v) v."""
    F = S.field
    v = np.asarray(v, dtype=np.int64)
    fv = S.q(v)
    if fv == 0:
        raise IsotropicVector("cannot reflect in an isotropic vector")
    c = F.neg[F.mul[F.two, F.inv[fv]]]
    Gv = matmul(F, S.gram, v[:, None])  # column G v^T
    R = F.mul[c, matmul(F, Gv, v[None, :])]
    return F.add[eye(S.dim), R]


def reflection(S: BilinearSpace, v) -> Isometry:
    return Isometry(S, reflection_matrix(S, v), validate=False)


# ---------------------------------------------------------------- spinor norm


def reflection_factors(phi: Isometry, rng: random.Random | None = None) -> list[np.ndarray]:
    """Anisotropic r_1, ..., r_k with M = R_k ... R_1, R_i the matrix of sigma_{r_i}.

    Cartan-Dieudonne induction: keep a nondegenerate subspace D fixed pointwise by
    the running product psi, and enlarge it by one anisotropic vector at a time.
    """
    S = phi.space
    F = S.field
    n = S.dim
    psi = phi.matrix.copy()
    D = zeros(0, n)
    vecs: list[np.ndarray] = []
    while D.shape[0] < n:
        perp = kernel(F, matmul(F, S.gram, transpose(D))) if D.shape[0] else eye(n)
        v = anisotropic_vector(S, perp, rng)
        vpsi = matmul(F, v[None, :], psi)[0]
        w = F.sub[v, vpsi]
        if w.any():
            if S.q(w):
                psi = matmul(F, psi, reflection_matrix(S, w))
                vecs.append(w)
            else:
                w2 = F.add[v, vpsi]
                psi = matmul(F, matmul(F, psi, reflection_matrix(S, w2)), reflection_matrix(S, v))
                vecs.extend([w2, v])
        D = np.concatenate([D, v[None, :]])
    if not (psi == eye(n)).all():
        raise AssertionError("reflection factorisation did not terminate at the identity")
    return vecs


def spinor_norm(phi: Isometry) -> SquareClass:
    F = phi.field
    S = phi.space
    theta = SQUARE
    for r in reflection_factors(phi):
        theta = theta * square_class(F, S.q(r))
    return theta


def in_omega(phi: Isometry) -> bool:
    """phi in Omega(V) = kernel of det and spinor norm (needs Witt index >= 1)."""
    if witt_index(phi.space) == 0:
        raise AnisotropicSmallSpace("Omega is not described by det and spinor norm on an anisotropic space")
    return phi.det == 1 and phi.spinor_norm is SQUARE


def in_group(phi: Isometry, group: str) -> bool:
    if group == "O":
        return True
    if group == "SO":
        return phi.det == 1
    if group == "Omega":
        return in_omega(phi)
    raise BadSpec(f"unknown group {group!r}")


def involution_on(S: BilinearSpace, T) -> Isometry:
    """-1 on the nondegenerate subspace T and +1 on its orthogonal complement."""
    F = S.field
    B = T.basis if isinstance(T, Subspace) else np.asarray(T, dtype=np.int64)
    if B.shape[0] == 0:
        return identity(S)
    if det(F, S.gram_of(B)) == 0:
        raise DegenerateSubspace("T is degenerate")
    P = kernel(F, matmul(F, S.gram, transpose(B)))
    basis = np.concatenate([B, P]) if P.shape[0] else B
    d = [F.minus_one] * B.shape[0] + [1] * P.shape[0]
    M = matmul(F, matmul(F, inverse(F, basis), np.diag(np.array(d, dtype=np.int64))), basis)
    return Isometry(S, M, validate=False)


# ---------------------------------------------------------------- canonical blocks


@dataclass(frozen=True)
class BlockSpec:
    """Description of a canonical orthogonally indecomposable block.

    kind is one of "type2pm" (odd (x-eps) block of size 2t+1 with given disc),
    "type1" (pair of (x-eps)^m blocks, m even), "type2" (p^d with p = p*,
    p != x +- 1), "type3" (r^d paired with its reciprocal).
    """

    kind: str
    eps: int = 1
    t: int = 0
    disc: SquareClass = SQUARE
    m: int = 0
    poly: tuple[int, ...] | None = None
    d: int = 1

    @classmethod
    def from_json(cls, obj: dict) -> "BlockSpec":
        kind = obj.get("block") or obj.get("kind")
        disc = obj.get("disc", "square")
        try:
            disc = disc if isinstance(disc, SquareClass) else SquareClass[str(disc).upper()]
        except KeyError:
            raise BadSpec(f"disc must be 'square' or 'nonsquare', got {disc!r}") from None
        poly = obj.get("p") or obj.get("poly")
        if kind not in ("type2pm", "type1", "type2", "type3"):
            raise BadSpec(f"unknown block kind {kind!r}")
        return cls(
            kind=kind,
            eps=int(obj.get("eps", 1)),
            t=int(obj.get("t", 0)),
            disc=disc,
            m=int(obj.get("m", 0)),
            poly=tuple(poly) if poly is not None else None,
            d=int(obj.get("d", 1)),
        )

    def to_json(self) -> dict:
        out: dict = {"block": self.kind}
        if self.kind == "type2pm":
            out.update(eps=self.eps, t=self.t, disc=self.disc.name.lower())
        elif self.kind == "type1":
            out.update(eps=self.eps, m=self.m)
        else:
            out.update(p=list(self.poly or ()), d=self.d)
        return out


def _block_poly(F: Field, spec: BlockSpec) -> Poly:
    if spec.poly is None:
        raise BadSpec(f"{spec.kind} block needs a polynomial")
    p = Poly(F, tuple(F.elem(c) for c in spec.poly))
    if p.degree < 1:
        raise BadSpec("block polynomial must have positive degree")
    p = p.monic()
    fac = poly_factor(p)
    if len(fac) != 1 or fac[0][1] != 1:
        raise BadSpec(f"{p} is not irreducible")
    if p.coeffs[0] == 0:
        raise BadSpec("x is not allowed as a block polynomial")
    return p


def build_block(F: Field, spec) -> tuple[BilinearSpace, Isometry]:
    """Canonical (space, isometry) for one indecomposable block."""
    if isinstance(spec, dict):
        spec = BlockSpec.from_json(spec)
    if spec.kind == "type2pm":
        if spec.eps not in (1, -1) or spec.t < 0:
            raise BadSpec("type2pm needs eps = +-1 and t >= 0")
        s = 2 * spec.t + 1
        # nilpotent shift N and a form with N G = -G N^T; then the Cayley
        # transform (I + N)(I - N)^{-1} is unipotent with one Jordan block
        N = zeros(s, s)
        for i in range(s - 1):
            N[i, i + 1] = 1
        G0 = zeros(s, s)
        for a in range(s):
            G0[a, s - 1 - a] = F.elem((-1) ** a)
        c = 1 if square_class(F, det(F, G0)) is spec.disc else F.nonsquare
        G = F.mul[c, G0]
        phi = matmul(F, F.add[eye(s), N], inverse(F, F.sub[eye(s), N]))
        if spec.eps == -1:
            phi = F.neg[phi]
        S = BilinearSpace(F, G)
        return S, Isometry(S, phi)
    if spec.kind == "type1":
        m = spec.m
        if spec.eps not in (1, -1) or m < 1:
            raise BadSpec("type1 needs eps = +-1 and m >= 1")
        if m % 2:
            raise BadSpec("type1 blocks have even Jordan size")
        A = jordan_block(F, F.elem(spec.eps), m)
        S = BilinearSpace.split(F, m)
        return S, Isometry(S, block_diag(A, contragredient(F, A)))
    if spec.kind == "type2":
        p = _block_poly(F, spec)
        if p.degree == 1 and p.coeffs[0] in (1, F.minus_one):
            raise BadSpec("x +- 1 blocks are type2pm or type1")
        if not p.is_selfreciprocal():
            raise BadSpec(f"{p} is not selfreciprocal")
        if spec.d < 1:
            raise BadSpec("exponent must be positive")
        C = companion(p**spec.d)
        S = invariant_form_for(F, C)
        return S, Isometry(S, C)
    if spec.kind == "type3":
        r = _block_poly(F, spec)
        if r.is_selfreciprocal():
            raise BadSpec(f"{r} is selfreciprocal; use a type2 block")
        if spec.d < 1:
            raise BadSpec("exponent must be positive")
        A = companion(r**spec.d)
        S = BilinearSpace.split(F, A.shape[0])
        return S, Isometry(S, block_diag(A, contragredient(F, A)))
    raise BadSpec(f"unknown block kind {spec.kind!r}")


def orthogonal_sum(*pairs: tuple[BilinearSpace, Isometry]) -> tuple[BilinearSpace, Isometry]:
    F = pairs[0][0].field
    G = block_diag(*[S.gram for S, _ in pairs])
    M = block_diag(*[phi.matrix for _, phi in pairs])
    S = BilinearSpace(F, G)
    return S, Isometry(S, M, validate=False)


def build_from_specs(F: Field, specs) -> tuple[BilinearSpace, Isometry]:
    return orthogonal_sum(*[build_block(F, s) for s in specs])


# ---------------------------------------------------------------- decomposition



def rprofile_example(q: int = 3) -> tuple[BilinearSpace, Isometry]:
    """Reversible but not bireflectional in Omega (q = 3 mod 4, dim 6):
    a fixed plane of disc +1 next to a type-1 block with divisors (x-1)^2, (x-1)^2."""
    if q % 4 != 3:
        raise BadSpec("the R-profile example needs q = 3 mod 4")
    F = field_make(q)
    sq = BlockSpec("type2pm", 1, 0, SQUARE)
    return build_from_specs(F, [sq, sq, BlockSpec("type1", 1, m=2)])


@dataclass(frozen=True)
class Summand:
    basis: np.ndarray
    tag: str  # "1", "2+", "2-", "2o", "2e", "3o", "3e"
    disc: SquareClass
    poly: Poly
    exponent: int
    eps: int = 0  # +-1 for (x -+ 1)-primary summands, else 0

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def to_json(self) -> dict:
        out = {
            "type": self.tag,
            "dim": self.dim,
            "disc": self.disc.name.lower(),
            "poly": [int(c) for c in self.poly.coeffs],
            "exponent": self.exponent,
        }
        if self.eps:
            out["eps"] = self.eps
        return out


@dataclass
class TypeSummary:
    summands: list[Summand]
    homogeneous: dict = dc_field(default_factory=dict)  # (eps, s) -> (m, D)

    def odd_pm_blocks(self) -> list[Summand]:
        return [s for s in self.summands if s.tag in ("2+", "2-")]

    def tags(self) -> list[str]:
        return [s.tag for s in self.summands]

    def to_json(self) -> dict:
        return {
            "summands": [s.to_json() for s in self.summands],
            "homogeneous": [
                {"eps": e, "size": s, "m": m, "disc": D.name.lower()}
                for (e, s), (m, D) in sorted(self.homogeneous.items())
            ],
        }


def _candidates(F: Field, W: np.ndarray, rng: random.Random, limit: int = 20000):
    """Basis rows first, then pseudo-random combinations."""
    for i in range(W.shape[0]):
        yield W[i]
    for _ in range(limit):
        c = np.array([rng.randrange(F.q) for _ in range(W.shape[0])], dtype=np.int64)
        if c.any():
            yield matmul(F, c[None, :], W)[0]


def _nil_index(F: Field, W: np.ndarray, N: np.ndarray) -> int:
    e, X = 0, W
    while X.any():
        X = matmul(F, X, N)
        e += 1
    return e


def _perp_in(S: BilinearSpace, W: np.ndarray, U: np.ndarray) -> np.ndarray:
    F = S.field
    K = kernel(F, matmul(F, matmul(F, W, S.gram), transpose(U)))
    return matmul(F, K, W) if K.shape[0] else zeros(0, S.dim)


def _split_selfdual(S, M, W, A, rng, deg, unit):
    """Split W into nondegenerate cyclic summands of maximal A-order (A = p(M),
    nilpotent on W, deg = deg p), or into pairs of them when ``unit`` is set
    and the order is even."""
    F = S.field
    out = []
    while W.shape[0]:
        e = _nil_index(F, W, A)
        Ae1 = mpow(F, A, e - 1)
        found = None
        for v in _candidates(F, W, rng):
            if not matmul(F, v[None, :], Ae1).any():
                continue
            Bv = cyclic_basis(F, v, M, e * deg)
            if unit and e % 2 == 0:
                for w in _candidates(F, W, rng, limit=200):
                    B = np.concatenate([Bv, cyclic_basis(F, w, M, e)])
                    if det(F, S.gram_of(B)):
                        found = B
                        break
            elif det(F, S.gram_of(Bv)):
                found = Bv
            if found is not None:
                break
        if found is None:
            raise InternalDecompositionFailure("no nondegenerate cyclic summand found")
        out.append((found, e))
        W = _perp_in(S, W, found)
    return out


def orthogonal_decompose(phi: Isometry, *, verify: bool = True) -> TypeSummary:
    """Orthogonal decomposition of V into phi-indecomposable summands."""
    S = phi.space
    F = S.field
    M = phi.matrix
    n = S.dim
    rng = random.Random(repr(("decompose", F.q, S.gram.tobytes(), M.tobytes())))
    summands: list[Summand] = []
    seen: set = set()
    mp = min_poly(F, M)
    for p, _ in poly_factor(mp):
        if p in seen:
            continue
        ps = poly_reciprocal(p)
        seen.update({p, ps})
        W = primary_component(F, M, p)
        if p.degree == 1 and p.coeffs[0] in (1, F.minus_one):
            eps = 1 if p.coeffs[0] == F.minus_one else -1
            A = msub(F, F.mul[F.elem(eps), M], eye(n))
            for B, e in _split_selfdual(S, M, W, A, rng, 1, unit=True):
                if e % 2:
                    tag = "2-" if eps == 1 else "2+"
                else:
                    tag = "1"
                summands.append(Summand(B, tag, gram_class(F, S.gram_of(B)), p, e, eps))
        elif p == ps:
            A = poly_eval_mat(p, M)
            for B, e in _split_selfdual(S, M, W, A, rng, p.degree, unit=False):
                tag = "2o" if e % 2 else "2e"
                summands.append(Summand(B, tag, gram_class(F, S.gram_of(B)), p, e))
        else:
            r, rs = (p, ps) if p < ps else (ps, p)
            Vr = primary_component(F, M, r)
            Vs = primary_component(F, M, rs)
            R = restrict(F, M, Vr)
            parts = []
            for c, _, d in cyclic_decomposition(F, R):
                g = matmul(F, c[None, :], Vr)[0]
                parts.append((cyclic_basis(F, g, M, d * r.degree), d))
            for i, (U, d) in enumerate(parts):
                others = [P for j, (P, _) in enumerate(parts) if j != i]
                Ud = _perp_in(S, Vs, np.concatenate(others)) if others else Vs
                B = np.concatenate([U, Ud])
                tag = "3o" if d % 2 else "3e"
                summands.append(Summand(B, tag, gram_class(F, S.gram_of(B)), r, d))
    hom: dict = {}
    for s in summands:
        if s.tag in ("2+", "2-"):
            m, D = hom.get((s.eps, s.exponent), (0, SQUARE))
            hom[(s.eps, s.exponent)] = (m + 1, D * s.disc)
    summary = TypeSummary(summands, hom)
    if verify:
        verify_decomposition(phi, summary)
    return summary


def verify_decomposition(phi: Isometry, summary: TypeSummary) -> None:
    S = phi.space
    F = S.field
    M = phi.matrix
    n = S.dim
    if not summary.summands:
        if n:
            raise InternalDecompositionFailure("empty decomposition of a nonzero space")
        return
    B = np.concatenate([s.basis for s in summary.summands])
    if B.shape[0] != n or rank(F, B) != n:
        raise InternalDecompositionFailure("summands do not span V")
    GB = S.gram_of(B)
    off = 0
    ed = []
    disc = SQUARE
    for s in summary.summands:
        k = s.dim
        if GB[off : off + k, :off].any() or GB[off : off + k, off + k :].any():
            raise InternalDecompositionFailure("summands are not orthogonal")
        if det(F, GB[off : off + k, off : off + k]) == 0:
            raise InternalDecompositionFailure("degenerate summand")
        if rank(F, np.concatenate([s.basis, matmul(F, s.basis, M)])) != k:
            raise InternalDecompositionFailure("summand is not invariant")
        ed.extend((p, d) for p, d, m in elementary_divisors(F, restrict(F, M, s.basis)).entries for _ in range(m))
        disc = disc * s.disc
        off += k
    if EDProfile.from_pairs(ed, n) != elementary_divisors(F, M):
        raise InternalDecompositionFailure("elementary divisors not preserved")
    if disc is not gram_class(F, S.gram):
        raise InternalDecompositionFailure("discriminants do not multiply to disc V")


def homogeneous_disc(phi: Isometry, eps: int, s: int) -> tuple[int, SquareClass]:
    """(m, D) of the homogeneous (x - eps)^s part, s = 2t+1, computed without a
    decomposition: D = (-1)^{t m} disc of f on Fix^{t+1} cap Bahn^t modulo
    Fix^{t+1} cap Bahn^t cap (Fix^t + Bahn^{t+1}), for eps*phi."""
    if s % 2 == 0:
        raise BadSpec("homogeneous discriminant is defined for odd block sizes")
    S = phi.space
    F = S.field
    n = S.dim
    t = (s - 1) // 2
    p = Poly.linear(F, F.elem(eps))
    W = primary_component(F, phi.matrix, p)
    if W.shape[0] == 0:
        return 0, SQUARE
    N = restrict(F, msub(F, F.mul[F.elem(eps), phi.matrix], eye(n)), W)
    w = W.shape[0]

    def ker(j):
        return Subspace(F, kernel(F, mpow(F, N, j)), w)

    def im(j):
        return Subspace(F, image(F, mpow(F, N, j)), w)

    U = ker(t + 1) & im(t)
    rad = U & (ker(t) + im(t + 1))
    Sw = BilinearSpace(F, S.gram_of(W))
    Q = induced_form(Sw, U, rad)
    m = Q.dim
    if m == 0:
        return 0, SQUARE
    D = gram_class(F, Q.gram) * (class_of_minus_one(F) if (t * m) % 2 else SQUARE)
    return m, D


# ---------------------------------------------------------------- random elements


def random_isometry(S: BilinearSpace, rng: random.Random, length: int | None = None) -> Isometry:
    """Product of ``length`` reflections in random anisotropic vectors."""
    F = S.field
    length = rng.randrange(S.dim + 3) if length is None else length
    M = eye(S.dim)
    for _ in range(length):
        v = _random_anisotropic(S, rng)
        M = matmul(F, M, reflection_matrix(S, v))
    return Isometry(S, M, validate=False)


def _random_anisotropic(S: BilinearSpace, rng: random.Random, cls: SquareClass | None = None):
    F = S.field
    while True:
        v = np.array([rng.randrange(F.q) for _ in range(S.dim)], dtype=np.int64)
        a = S.q(v)
        if a and (cls is None or square_class(F, a) is cls):
            return v


def random_element(S: BilinearSpace, group: str, rng: random.Random, pairs: int | None = None) -> Isometry:
    """Random element of O, SO or Omega built from reflections.

    Omega elements are products of sigma_a sigma_b with f(a,a), f(b,b) in the
    same square class; SO elements are products of an even number of reflections.
    """
    F = S.field
    if group == "O":
        return random_isometry(S, rng)
    pairs = rng.randrange(1, S.dim + 2) if pairs is None else pairs
    M = eye(S.dim)
    for _ in range(pairs):
        a = _random_anisotropic(S, rng)
        cls = square_class(F, S.q(a))
        if group == "SO":
            cls = None
        elif group != "Omega":
            raise BadSpec(f"unknown group {group!r}")
        b = _random_anisotropic(S, rng, cls)
        M = matmul(F, matmul(F, M, reflection_matrix(S, a)), reflection_matrix(S, b))
    return Isometry(S, M, validate=False)


# ---------------------------------------------------------------- intertwiners


def _rowdot(F: Field, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise f-free dot products x . y over the field."""
    if F.k == 1:
        return (X * Y).sum(axis=1) % F.p
    out = np.zeros(X.shape[0], dtype=np.int64)
    for j in range(X.shape[1]):
        out = F.add[out, F.mul[X[:, j], Y[:, j]]]
    return out


def intertwiners(
    phi: Isometry,
    psi: Isometry,
    *,
    first: bool = False,
    max_results: int = 2_000_000,
    max_branch: int = 600_000,
) -> np.ndarray:
    """All isometries X of V with phi X = X psi (as maps: x phi X = x X psi).

    psi = phi gives the centraliser in O(V); psi = phi^{-1} gives the
    reversing elements.  Backtracks over generators g_i of a cyclic
    decomposition of phi: the image w_i of g_i lies in ker a_i(psi), the
    Gram data f(w_i psi^a, w_j psi^b) must match, cross terms are linear in
    the newest w, and self terms are tested in bulk.
    """
    S = phi.space
    F = S.field
    G = S.gram
    M, P = phi.matrix, psi.matrix
    n = S.dim
    if n == 0:
        return np.zeros((1, 0, 0), dtype=np.int64)
    gens = sorted(
        cyclic_decomposition(F, M), key=lambda g: -g[1].degree * g[2]
    )
    Ds = [p.degree * d for _, p, d in gens]
    Bs = [cyclic_basis(F, g, M, D) for (g, _, _), D in zip(gens, Ds)]
    B = np.concatenate(Bs)
    Binv = inverse(F, B)
    maxD = max(Ds)
    Ppow = [eye(n)]
    for _ in range(maxD):
        Ppow.append(matmul(F, Ppow[-1], P))
    PG = [matmul(F, Q, G) for Q in Ppow]  # psi^a G
    kers = [kernel(F, poly_eval_mat(p**d, P)) for _, p, d in gens]
    # target Gram data
    tgt = {(i, j): S.gram_of(Bs[i]) if i == j else matmul(F, matmul(F, Bs[i], G), transpose(Bs[j]))
           for i in range(len(gens)) for j in range(i + 1)}
    results: list[np.ndarray] = []
    total = [0]

    def cyc(w, D):
        return np.stack([matmul(F, w, Ppow[a]) for a in range(D)], axis=1)  # (N, D, n)

    def level(j, chosen):
        K = kers[j]
        D = Ds[j]
        if K.shape[0] == 0:
            return
        # linear constraints from earlier images: f(w_i psi^a, w_j psi^b) = tgt[j, i][b, a]
        rows, rhs = [], []
        for i, Wi in enumerate(chosen):
            T = tgt[(j, i)]
            WiG = matmul(F, Wi, G)
            for b in range(D):
                A = matmul(F, WiG, transpose(Ppow[b]))  # (D_i, n): rows . w_j
                rows.append(matmul(F, A, transpose(K)))
                rhs.append(T[b, :])
        kd = K.shape[0]
        if rows:
            C = np.concatenate(rows)  # (ncons, kd)
            r = np.concatenate(rhs)
            try:
                z0 = solve(F, transpose(C), r[None, :])[0]
            except Inconsistent:
                return
            Nul = kernel(F, transpose(C))
        else:
            z0 = np.zeros(kd, dtype=np.int64)
            Nul = eye(kd)
        nul = Nul.shape[0]
        if F.q**nul > max_branch:
            raise CentralizerTooLarge(f"branch of size {F.q}^{nul} exceeds {max_branch}")
        combos = vectors(F, nul) if nul else np.zeros((1, 0), dtype=np.int64)
        Z = F.add[z0[None, :], matmul(F, combos, Nul)] if nul else z0[None, :]
        Wc = matmul(F, Z, K)  # (N, n)
        # self terms f(w psi^a, w) = tgt[j, j][a, 0]
        T = tgt[(j, j)]
        ok = np.ones(Wc.shape[0], dtype=bool)
        for a in range(D):
            vals = _rowdot(F, matmul(F, Wc, PG[a]), Wc)
            ok &= vals == T[a, 0]
        Wc = Wc[ok]
        if Wc.shape[0] == 0:
            return
        Cyc = cyc(Wc, D)
        if j == len(gens) - 1:
            prefix = np.concatenate(chosen) if chosen else zeros(0, n)
            Wfull = np.concatenate([np.broadcast_to(prefix, (Cyc.shape[0],) + prefix.shape), Cyc], axis=1)
            X = matmul(F, Binv[None, :, :], Wfull)
            results.append(X)
            total[0] += X.shape[0]
            if total[0] > max_results:
                raise CentralizerTooLarge(f"more than {max_results} intertwiners")
            return
        for idx in range(Cyc.shape[0]):
            level(j + 1, chosen + [Cyc[idx]])
            if first and results:
                return

    level(0, [])
    if not results:
        return np.zeros((0, n, n), dtype=np.int64)
    out = np.concatenate(results)
    return out[:1] if first else out


def centralizer(phi: Isometry, **kw) -> np.ndarray:
    return intertwiners(phi, phi, **kw)


def reversers(phi: Isometry, **kw) -> np.ndarray:
    return intertwiners(phi, phi.inverse(), **kw)

"""Nondegenerate symmetric bilinear spaces over GF(q).

The discriminant is the plain square class of det G, with no
dimension-dependent sign twist; a hyperbolic plane therefore has
discriminant class(-1).
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from .algebra import NONSQUARE, SQUARE, Field, SquareClass, square_class
from .errors import (
    Degenerate,
    DescentFails,
    DimensionMismatch,
    ExhaustedSolutionSpace,
    NoInvariantForm,
    NotNested,
)
from .linalg import (
    Subspace,
    asmat,
    block_diag,
    complement_basis,
    det,
    eye,
    invariant_factors,
    kernel,
    matmul,
    rank,
    transpose,
    zeros,
)


class BilinearSpace:
    """(K^n, f) with f(u, v) = u G v^T.

    ``validate=False`` skips the symmetry/nondegeneracy checks; it exists for
    induced forms that the caller explicitly allows to be degenerate.
    """

    def __init__(self, field: Field, gram, *, validate: bool = True):
        self.field = field
        G = asmat(field, gram) if not isinstance(gram, np.ndarray) else gram.astype(np.int64)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise DimensionMismatch("Gram matrix must be square")
        self.gram = G
        self.gram.setflags(write=False)
        if validate:
            if not (G == G.T).all():
                raise Degenerate("Gram matrix is not symmetric")
            if det(field, G) == 0:
                raise Degenerate("form is degenerate")

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, BilinearSpace)
            and self.field == other.field
            and self.gram.shape == other.gram.shape
            and bool((self.gram == other.gram).all())
        )

    def __hash__(self):
        return hash((self.field, self.gram.tobytes()))

    def __repr__(self):
        return f"BilinearSpace({self.field}, dim={self.dim}, gram={self.gram.tolist()})"

    def f(self, u, v) -> int:
        F = self.field
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return int(matmul(F, matmul(F, u[None, :], self.gram), v[:, None])[0, 0])

    def q(self, v) -> int:
        return self.f(v, v)

    def gram_of(self, B) -> np.ndarray:
        """Gram matrix of the rows of B."""
        F = self.field
        B = np.asarray(B, dtype=np.int64)
        if B.shape[0] == 0:
            return zeros(0, 0)
        return matmul(F, matmul(F, B, self.gram), transpose(B))

    # ------------------------------------------------------------ constructors

    @classmethod
    def standard(cls, F: Field, n: int, disc: SquareClass = SQUARE) -> "BilinearSpace":
        """diag(1, ..., 1, c) with class(c) = disc."""
        if n == 0:
            return cls(F, zeros(0, 0))
        d = [1] * n
        if disc is NONSQUARE:
            d[-1] = F.nonsquare
        return cls(F, np.diag(np.array(d, dtype=np.int64)))

    @classmethod
    def hyperbolic(cls, F: Field, m: int) -> "BilinearSpace":
        """Orthogonal sum of m hyperbolic planes [[0,1],[1,0]]."""
        plane = np.array([[0, 1], [1, 0]], dtype=np.int64)
        return cls(F, block_diag(*([plane] * m)) if m else zeros(0, 0))

    @classmethod
    def split(cls, F: Field, m: int) -> "BilinearSpace":
        """antidiag(I_m, I_m): the layout used for paired blocks."""
        G = zeros(2 * m, 2 * m)
        G[:m, m:] = eye(m)
        G[m:, :m] = eye(m)
        return cls(F, G)

    def orthogonal_sum(self, other: "BilinearSpace") -> "BilinearSpace":
        return BilinearSpace(self.field, block_diag(self.gram, other.gram))


def discriminant(S: BilinearSpace) -> SquareClass:
    d = det(S.field, S.gram)
    if d == 0:
        raise Degenerate("discriminant of a degenerate space")
    return square_class(S.field, d)


def gram_class(F: Field, G) -> SquareClass:
    """Square class of det G for a nondegenerate Gram matrix (empty -> square)."""
    if np.asarray(G).shape[0] == 0:
        return SQUARE
    d = det(F, G)
    if d == 0:
        raise Degenerate("degenerate Gram matrix")
    return square_class(F, d)


def orthogonal_complement(S: BilinearSpace, U) -> Subspace:
    F = S.field
    B = U.basis if isinstance(U, Subspace) else np.asarray(U, dtype=np.int64)
    if B.shape[0] == 0:
        return Subspace.whole(F, S.dim)
    return Subspace(F, kernel(F, matmul(F, S.gram, transpose(B))), S.dim)


def anisotropic_vector(S: BilinearSpace, B, rng: random.Random | None = None):
    """A vector in span(B) with f(v, v) != 0; B spans a nondegenerate subspace."""
    F = S.field
    B = np.asarray(B, dtype=np.int64)
    k = B.shape[0]
    if k == 0:
        return None
    if rng is None:
        cands = itertools.chain(
            (B[i] for i in range(k)),
            (F.add[B[i], B[j]] for i in range(k) for j in range(i + 1, k)),
        )
        for v in cands:
            if S.q(v):
                return v
    rng = rng or random.Random(0)
    for _ in range(10000):
        c = np.array([rng.randrange(F.q) for _ in range(k)], dtype=np.int64)
        v = matmul(F, c[None, :], B)[0]
        if v.any() and S.q(v):
            return v
    raise Degenerate("no anisotropic vector found; subspace looks totally isotropic")


def orthogonal_basis(S: BilinearSpace, B=None) -> np.ndarray:
    """Rows forming an orthogonal basis of span(B) (nondegenerate)."""
    F = S.field
    W = eye(S.dim) if B is None else np.asarray(B, dtype=np.int64)
    out = []
    while W.shape[0]:
        v = anisotropic_vector(S, W)
        out.append(v)
        W = _perp_within(S, W, v[None, :])
    return np.array(out, dtype=np.int64) if out else zeros(0, S.dim)


def _perp_within(S: BilinearSpace, W, U) -> np.ndarray:
    """Basis of {x in span(W) : f(x, U) = 0}."""
    F = S.field
    if W.shape[0] == 0:
        return W
    K = kernel(F, matmul(F, matmul(F, W, S.gram), transpose(U)))
    if K.shape[0] == 0:
        return zeros(0, S.dim)
    return matmul(F, K, W)


def isotropic_vector(S: BilinearSpace, B=None):
    """A nonzero isotropic vector of span(B), or None if that subspace is anisotropic.

    Diagonalise, then solve a x^2 + b y^2 + c z^2 = 0 on (at most) three
    orthogonal coordinates; every nondegenerate ternary form over a finite
    field is isotropic, so spaces of dimension >= 3 always succeed.
    """
    F = S.field
    O = orthogonal_basis(S, B)
    k = O.shape[0]
    if k == 0:
        return None
    a = [S.q(O[i]) for i in range(min(k, 3))]
    mul, add = F.mul, F.add
    sq = mul[np.arange(F.q), np.arange(F.q)]
    if k == 1:
        return None
    for z in ([0, 1] if k >= 3 else [0]):
        cz = mul[a[2], sq[z]] if k >= 3 else 0
        for x in range(F.q):
            for y in range(F.q):
                if x == y == z == 0:
                    continue
                if add[add[mul[a[0], sq[x]], mul[a[1], sq[y]]], cz] == 0:
                    coef = np.array([x, y] + ([z] if k >= 3 else []), dtype=np.int64)
                    return matmul(F, coef[None, :], O[: len(coef)])[0]
    return None


def witt_decomposition(S: BilinearSpace):
    """(list of hyperbolic pairs (v, w), anisotropic kernel basis)."""
    F = S.field
    W = eye(S.dim)
    pairs = []
    while W.shape[0] >= 2:
        v = isotropic_vector(S, W)
        if v is None:
            break
        # partner with f(v, w) = 1 inside span(W)
        fv = matmul(F, matmul(F, W, S.gram), v[:, None])[:, 0]
        i = int(np.flatnonzero(fv)[0])
        w = F.mul[F.inv[fv[i]], W[i]]
        # make w isotropic: w - (f(w,w)/2) v
        c = F.mul[S.q(w), F.inv[F.two]]
        w = F.sub[w, F.mul[c, v]]
        pairs.append((v, w))
        W = _perp_within(S, W, np.array([v, w]))
    return pairs, W


def witt_index(S: BilinearSpace) -> int:
    if S.dim and det(S.field, S.gram) == 0:
        raise Degenerate("Witt index of a degenerate space")
    return len(witt_decomposition(S)[0])


def is_hyperbolic(S: BilinearSpace) -> bool:
    return S.dim % 2 == 0 and witt_index(S) == S.dim // 2


def induced_form(
    S: BilinearSpace, U: Subspace, W: Subspace, *, nondegenerate: bool = True
) -> BilinearSpace:
    """The form f descended to U/W, in a canonical transversal basis."""
    F = S.field
    if not W <= U:
        raise NotNested("W is not contained in U")
    if U.dim and W.dim and matmul(F, matmul(F, U.basis, S.gram), transpose(W.basis)).any():
        raise NotNested("U is not contained in W^perp")
    T = complement_basis(F, W.basis, U.basis)
    G = S.gram_of(T)
    if G.shape[0] and det(F, G) == 0:
        if nondegenerate:
            raise DescentFails("induced form on U/W is degenerate")
        return BilinearSpace(F, G, validate=False)
    return BilinearSpace(F, G)


def invariant_form_for(
    F: Field, M, *, seed: int = 0, exhaustive_limit: int = 20000, tries: int = 4000
) -> BilinearSpace:
    """A nondegenerate symmetric G with M G M^T = G.

    The identity is preferred when it works; otherwise the solution space is
    scanned exhaustively (small) or by a fixed-seed pseudo-random walk.
    """
    M = asmat(F, M) if not isinstance(M, np.ndarray) else M.astype(np.int64)
    n = M.shape[0]
    for f in invariant_factors(F, M):
        if f.coeffs[0] == 0 or not f.is_selfreciprocal():
            raise NoInvariantForm(f"invariant factor {f} is not selfreciprocal")
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    rows = []
    for i, j in idx:
        E = zeros(n, n)
        E[i, j] = E[j, i] = 1
        rows.append(F.sub[matmul(F, matmul(F, M, E), transpose(M)), E].ravel())
    K = kernel(F, np.array(rows, dtype=np.int64))
    s = K.shape[0]
    if s == 0:
        raise ExhaustedSolutionSpace("no nonzero invariant symmetric form")

    def build(c):
        v = matmul(F, np.asarray(c, dtype=np.int64)[None, :], K)[0]
        G = zeros(n, n)
        for t, (i, j) in enumerate(idx):
            G[i, j] = G[j, i] = v[t]
        return G

    if (matmul(F, M, transpose(M)) == eye(n)).all():
        return BilinearSpace(F, eye(n))
    if F.q**s <= exhaustive_limit:
        cands = itertools.product(range(F.q), repeat=s)
    else:
        rng = random.Random(seed)
        cands = ([rng.randrange(F.q) for _ in range(s)] for _ in range(tries))
    for c in cands:
        if not any(c):
            continue
        G = build(c)
        if det(F, G):
            return BilinearSpace(F, G)
    raise ExhaustedSolutionSpace("no nondegenerate member found in the solution space")


def space_with(F: Field, n: int, disc: SquareClass) -> BilinearSpace:
    """Canonical test space of given dimension and discriminant."""
    return BilinearSpace.standard(F, n, disc)


def vectors(F: Field, n: int) -> np.ndarray:
    """All q^n vectors of K^n, lexicographic."""
    grids = np.indices((F.q,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


def rank_of(F: Field, B) -> int:
    return rank(F, B)

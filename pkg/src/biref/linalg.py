"""Exact matrix algebra over GF(q).

Matrices are numpy ``int64`` arrays of encoded field elements.  Vectors are
rows and linear maps act on the right (``v -> v @ M``); kernels, images and
subspaces are all stored as row bases in reduced echelon form, so equal
subspaces have bit-identical bases.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import Field, Poly, poly_factor, poly_lcm, poly_reciprocal
from .errors import DimensionMismatch, Inconsistent, Singular

MAX_DIM = 12


def asmat(F: Field, rows) -> np.ndarray:
    """Encode a nested list of ints / coefficient lists as a matrix."""
    if isinstance(rows, np.ndarray) and rows.dtype.kind in "iu":
        return rows.astype(np.int64) % F.q if F.k == 1 else rows.astype(np.int64)
    out = [[F.elem(x) for x in row] for row in rows]
    if not out:
        return np.zeros((0, 0), dtype=np.int64)
    return np.array(out, dtype=np.int64).reshape(len(out), -1)


def asvec(F: Field, v) -> np.ndarray:
    return asmat(F, [list(v)])[0]


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=np.int64)


def scalar(F: Field, c: int, n: int) -> np.ndarray:
    return np.diag(np.full(n, c, dtype=np.int64))


def diag(entries) -> np.ndarray:
    return np.diag(np.asarray(entries, dtype=np.int64))


def block_diag(*blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    out = zeros(n, m)
    i = j = 0
    for b in blocks:
        out[i : i + b.shape[0], j : j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def madd(F: Field, A, B):
    return F.add[A, B]


def msub(F: Field, A, B):
    return F.sub[A, B]


def mneg(F: Field, A):
    return F.neg[A]


def mscale(F: Field, c: int, A):
    return F.mul[c, A]


def matmul(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Product over GF(q); broadcasts over leading (batch) axes."""
    if A.shape[-1] != B.shape[-2]:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    if F.k == 1:
        return np.matmul(A, B) % F.p
    add, mul = F.add, F.mul
    shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2]) + (A.shape[-2], B.shape[-1])
    out = np.zeros(shape, dtype=np.int64)
    for k in range(A.shape[-1]):
        out = add[out, mul[A[..., :, k, None], B[..., None, k, :]]]
    return out


def mpow(F: Field, M: np.ndarray, e: int) -> np.ndarray:
    if e < 0:
        M, e = inverse(F, M), -e
    R = eye(M.shape[0])
    B = M
    while e:
        if e & 1:
            R = matmul(F, R, B)
        B = matmul(F, B, B)
        e >>= 1
    return R


def transpose(M: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.swapaxes(M, -1, -2))


def rref(F: Field, A) -> tuple[np.ndarray, list[int]]:
    R = np.array(A, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise DimensionMismatch("rref needs a 2-d array")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    inv, mul, sub = F.inv, F.mul, F.sub
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = mul[inv[R[r, c]], R[r]]
        col = R[:, c].copy()
        col[r] = 0
        nzr = np.flatnonzero(col)
        if nzr.size:
            R[nzr] = sub[R[nzr], mul[col[nzr][:, None], R[r][None, :]]]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: Field, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])


def rowspace(F: Field, A) -> np.ndarray:
    """Canonical (reduced echelon) basis of the row space."""
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return zeros(0, A.shape[1] if A.ndim == 2 else 0)
    R, piv = rref(F, A)
    return R[: len(piv)]


def right_kernel(F: Field, A) -> np.ndarray:
    """Rows x with A @ x^T = 0, canonical basis."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    if A.shape[0] == 0:
        return eye(n)
    R, piv = rref(F, A)
    free = [c for c in range(n) if c not in piv]
    basis = zeros(len(free), n)
    for t, c in enumerate(free):
        basis[t, c] = 1
        for i, pc in enumerate(piv):
            basis[t, pc] = F.neg[R[i, c]]
    return rowspace(F, basis)


def kernel(F: Field, A) -> np.ndarray:
    """Left kernel {v : v A = 0} as a canonical row basis."""
    A = np.asarray(A, dtype=np.int64)
    return right_kernel(F, transpose(A)) if A.shape[0] else zeros(0, 0)


def image(F: Field, A) -> np.ndarray:
    """Image of v -> v A, canonical row basis."""
    return rowspace(F, A)


def solve(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """One X with X @ A = B (row convention); raises Inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    vec = B.ndim == 1
    if vec:
        B = B[None, :]
    m, n = A.shape
    if B.shape[1] != n:
        raise DimensionMismatch("solve: column counts differ")
    # A^T X^T = B^T
    aug = np.concatenate([transpose(A), transpose(B)], axis=1)
    R, piv = rref(F, aug)
    if any(p >= m for p in piv):
        raise Inconsistent("linear system has no solution")
    X = zeros(B.shape[0], m)
    for i, pc in enumerate(piv):
        X[:, pc] = R[i, m:]
    return X[0] if vec else X


def inverse(F: Field, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch("inverse of a non-square matrix")
    R, piv = rref(F, np.concatenate([A, eye(n)], axis=1))
    if n and (len(piv) < n or piv[n - 1] != n - 1):
        raise Singular("matrix is singular")
    return R[:, n:].copy()


def det(F: Field, A: np.ndarray) -> int:
    R = np.array(A, dtype=np.int64, copy=True)
    n = R.shape[0]
    d = 1
    for c in range(n):
        nz = np.flatnonzero(R[c:, c])
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            R[[c, i]] = R[[i, c]]
            d = int(F.neg[d])
        piv = R[c, c]
        d = int(F.mul[d, piv])
        inv = F.inv[piv]
        below = np.flatnonzero(R[c + 1 :, c]) + c + 1
        if below.size:
            fac = F.mul[R[below, c], inv]
            R[below] = F.sub[R[below], F.mul[fac[:, None], R[c][None, :]]]
    return d


def mat_core(F: Field, M: np.ndarray) -> dict:
    """Bundle of the basic exact operations on one matrix."""
    M = np.asarray(M, dtype=np.int64)
    out = {
        "transpose": transpose(M),
        "rank": rank(F, M),
        "kernel": kernel(F, M),
    }
    if M.shape[0] == M.shape[1]:
        try:
            out["inverse"] = inverse(F, M)
        except Singular:
            out["inverse"] = None
    out["solve"] = lambda B: solve(F, M, B)
    return out


def contragredient(F: Field, A: np.ndarray) -> np.ndarray:
    """A^+ = (A')^{-1}."""
    return transpose(inverse(F, A))


# ---------------------------------------------------------------- subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of K^n, held as a canonical reduced echelon row basis."""

    field: Field
    basis: np.ndarray
    ambient: int = dc_field(default=-1)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.int64)
        n = self.ambient if self.ambient >= 0 else b.shape[1]
        if b.size == 0:
            b = zeros(0, n)
        else:
            b = rowspace(self.field, b)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "ambient", n)

    @classmethod
    def span(cls, F: Field, rows, n: int | None = None) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim == 1:
            rows = rows[None, :] if rows.size else zeros(0, n or 0)
        return cls(F, rows, rows.shape[1] if n is None else n)

    @classmethod
    def whole(cls, F: Field, n: int) -> "Subspace":
        return cls(F, eye(n), n)

    @classmethod
    def zero(cls, F: Field, n: int) -> "Subspace":
        return cls(F, zeros(0, n), n)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.basis.shape == other.basis.shape
            and bool((self.basis == other.basis).all())
        )

    def __hash__(self):
        return hash((self.ambient, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64)
        if v.ndim == 1:
            v = v[None, :]
        return rank(self.field, np.concatenate([self.basis, v])) == self.dim

    def __le__(self, other: "Subspace") -> bool:
        return other.contains(self.basis) if self.dim else True

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.field, np.concatenate([self.basis, other.basis]), self.ambient)

    def __and__(self, other: "Subspace") -> "Subspace":
        F = self.field
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(F, self.ambient)
        K = kernel(F, np.concatenate([self.basis, other.basis]))
        if K.shape[0] == 0:
            return Subspace.zero(F, self.ambient)
        return Subspace(F, matmul(F, K[:, : self.dim], self.basis), self.ambient)

    def image_under(self, M: np.ndarray) -> "Subspace":
        if self.dim == 0:
            return self
        return Subspace(self.field, matmul(self.field, self.basis, M), self.ambient)

    def is_invariant(self, M: np.ndarray) -> bool:
        return self.image_under(M) <= self

    def coordinates(self, v) -> np.ndarray:
        """Coordinates of v (rows) with respect to ``basis``."""
        return solve(self.field, self.basis, v)


def complement_basis(F: Field, sub: np.ndarray, sup: np.ndarray) -> np.ndarray:
    """Rows of ``sup`` (in order) extending ``sub`` to a basis of span(sub, sup)."""
    chosen = [r for r in np.asarray(sub, dtype=np.int64)]
    extra = []
    cur = len(chosen) and rank(F, np.array(chosen))
    for row in np.asarray(sup, dtype=np.int64):
        r = rank(F, np.array(chosen + [row]))
        if r > cur:
            chosen.append(row)
            extra.append(row)
            cur = r
    if not extra:
        return zeros(0, np.asarray(sup).shape[1])
    return np.array(extra, dtype=np.int64)


def restrict(F: Field, M: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix R of M on the invariant subspace with basis rows B (B M = R B)."""
    if B.shape[0] == 0:
        return zeros(0, 0)
    return solve(F, B, matmul(F, B, M))


# ---------------------------------------------------------------- polynomials of matrices


def poly_eval_mat(f: Poly, M: np.ndarray) -> np.ndarray:
    F = f.field
    n = M.shape[0]
    R = zeros(n, n)
    for c in reversed(f.coeffs):
        R = matmul(F, R, M)
        R[np.arange(n), np.arange(n)] = F.add[R[np.arange(n), np.arange(n)], c]
    return R


def companion(f: Poly) -> np.ndarray:
    """Companion matrix for the row convention: e_i -> e_{i+1}, e_{d-1} -> -sum a_j e_j."""
    F = f.field
    f = f.monic()
    d = f.degree
    C = zeros(d, d)
    for i in range(d - 1):
        C[i, i + 1] = 1
    for j in range(d):
        C[d - 1, j] = F.neg[f.coeffs[j]]
    return C


def jordan_block(F: Field, lam: int, size: int) -> np.ndarray:
    J = scalar(F, lam, size)
    for i in range(size - 1):
        J[i, i + 1] = 1
    return J


def min_poly(F: Field, M: np.ndarray) -> Poly:
    """Least-degree monic annihilator, from the first linear dependency among I, M, M^2, ..."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    if n == 0:
        return Poly.const(F, 1)
    powers = [eye(n).ravel()]
    P = eye(n)
    for k in range(1, n + 1):
        P = matmul(F, P, M)
        powers.append(P.ravel())
        K = kernel(F, np.array(powers))
        if K.shape[0]:
            # kernel is one-dimensional at the first dependency and has a
            # nonzero last coordinate
            v = K[-1]
            return Poly(F, tuple(int(c) for c in v)).monic()
    raise AssertionError("Cayley-Hamilton violated")


# ---------------------------------------------------------------- elementary divisors


def _snf_diagonal(A: list[list[Poly]]) -> list[Poly]:
    n = len(A)
    F = A[0][0].field
    zero = Poly(F, ())
    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    e = A[i][j]
                    if e.coeffs and (best is None or e.degree < A[best[0]][best[1]].degree):
                        best = (i, j)
            if best is None:
                return [A[i][i] for i in range(t)] + [zero] * (n - t)
            i, j = best
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
            piv = A[t][t]
            clean = True
            for i in range(t + 1, n):
                if A[i][t].coeffs:
                    qt, r = divmod(A[i][t], piv)
                    A[i] = [a - qt * b for a, b in zip(A[i], A[t])]
                    clean = clean and r.is_zero()
            for j in range(t + 1, n):
                if A[t][j].coeffs:
                    qt, r = divmod(A[t][j], piv)
                    for row in A:
                        row[j] = row[j] - qt * row[t]
                    clean = clean and r.is_zero()
            if not clean:
                continue
            bad = next(
                (
                    i
                    for i in range(t + 1, n)
                    for j in range(t + 1, n)
                    if not (A[i][j] % piv).is_zero()
                ),
                None,
            )
            if bad is not None:
                A[t] = [a + b for a, b in zip(A[t], A[bad])]
                continue
            break
    return [A[i][i] for i in range(n)]


def invariant_factors(F: Field, M: np.ndarray) -> list[Poly]:
    """Nonconstant invariant factors of M from the Smith form of xI - M."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    if n == 0:
        return []
    A = [
        [
            Poly(F, (int(F.neg[M[i, j]]), 1 if i == j else 0))
            for j in range(n)
        ]
        for i in range(n)
    ]
    diag_ = [d.monic() for d in _snf_diagonal(A)]
    out = [d for d in diag_ if d.degree > 0]
    out.sort(key=lambda f: f.degree)
    return out


@dataclass(frozen=True)
class EDProfile:
    """Multiset of elementary divisors p^d: entries are (p, d, multiplicity)."""

    entries: tuple[tuple[Poly, int, int], ...]
    dim: int

    def __post_init__(self):
        ent = tuple(sorted(self.entries, key=lambda t: (t[0].sort_key(), t[1])))
        object.__setattr__(self, "entries", ent)
        total = sum(m * d * p.degree for p, d, m in ent)
        if total != self.dim:
            raise ValueError(f"profile degrees sum to {total}, expected {self.dim}")

    @classmethod
    def from_pairs(cls, pairs, dim: int) -> "EDProfile":
        c = Counter((p, d) for p, d in pairs)
        return cls(tuple((p, d, m) for (p, d), m in c.items()), dim)

    def as_counter(self) -> Counter:
        return Counter({(p, d): m for p, d, m in self.entries})

    def mult(self, p: Poly, d: int) -> int:
        return next((m for pp, dd, m in self.entries if pp == p and dd == d), 0)

    def primes(self) -> list[Poly]:
        seen = []
        for p, _, _ in self.entries:
            if p not in seen:
                seen.append(p)
        return seen

    def exponents(self, p: Poly) -> list[int]:
        """Block exponents of p with repetition, largest first."""
        out = []
        for pp, d, m in self.entries:
            if pp == p:
                out += [d] * m
        return sorted(out, reverse=True)

    def is_selfreciprocal(self) -> bool:
        c = self.as_counter()
        return all(c.get((poly_reciprocal(p), d), 0) == m for (p, d), m in c.items())

    def min_poly(self) -> Poly:
        F = self.entries[0][0].field
        out = Poly.const(F, 1)
        for p, d, _ in self.entries:
            out = poly_lcm(out, p**d)
        return out

    def to_json(self) -> list:
        return [
            {"p": [p.field.encode(c) for c in p.coeffs], "d": d, "mult": m}
            for p, d, m in self.entries
        ]


def elementary_divisors(F: Field, M: np.ndarray) -> EDProfile:
    M = np.asarray(M, dtype=np.int64)
    if det(F, M) == 0:
        raise Singular("elementary divisors are only computed for invertible maps")
    pairs = []
    for f in invariant_factors(F, M):
        for p, e in poly_factor(f):
            pairs.append((p, e))
    return EDProfile.from_pairs(pairs, M.shape[0])


def elementary_divisors_by_rank(F: Field, M: np.ndarray) -> EDProfile:
    """Same profile from kernel dimensions of p(M)^j (used as a cross-check)."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    pairs = []
    for p, _ in poly_factor(min_poly(F, M)):
        P = poly_eval_mat(p, M)
        dims = [0]
        Q = eye(n)
        while True:
            Q = matmul(F, Q, P)
            dims.append(n - rank(F, Q))
            if dims[-1] == dims[-2]:
                break
        dims.pop()
        # number of blocks of size >= j is (dims[j] - dims[j-1]) / deg p
        ge = [(dims[j] - dims[j - 1]) // p.degree for j in range(1, len(dims))] + [0]
        for j in range(1, len(dims)):
            cnt = ge[j - 1] - ge[j]
            pairs += [(p, j)] * cnt
    return EDProfile.from_pairs(pairs, n)


# ---------------------------------------------------------------- subspace chains


@dataclass(frozen=True)
class SubspaceChain:
    """Kernels ("Fix^j", or "Neg^j" for eps = -1) and images ("Bahn^j") of (M - eps)^j."""

    target: object
    kernels: tuple[Subspace, ...]
    images: tuple[Subspace, ...]

    @property
    def fix(self):
        return self.kernels

    @property
    def bahn(self):
        return self.images

    @property
    def fix_inf(self) -> Subspace:
        return self.kernels[-1]

    @property
    def bahn_inf(self) -> Subspace:
        return self.images[-1]


def subspace_chain(F: Field, M: np.ndarray, eps=1) -> SubspaceChain:
    """Chain for (M - eps I)^j, or p(M)^j when ``eps`` is a Poly."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    if isinstance(eps, Poly):
        A = poly_eval_mat(eps, M)
    else:
        A = msub(F, M, scalar(F, F.elem(eps), n))
    kers, ims = [], []
    P = eye(n)
    while True:
        P = matmul(F, P, A)
        K = Subspace(F, kernel(F, P), n)
        I = Subspace(F, image(F, P), n)
        if kers and K.dim == kers[-1].dim:
            break
        kers.append(K)
        ims.append(I)
        if K.dim == n:
            break
    return SubspaceChain(eps, tuple(kers), tuple(ims))


def fitting_dim_phi_squared(F: Field, M: np.ndarray) -> int:
    """dim of the Fitting one space of M^2 - 1, i.e. rank((M^2 - 1)^n)."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    A = msub(F, matmul(F, M, M), eye(n))
    return rank(F, mpow(F, A, n)) if n else 0


def centralizer_basis(F: Field, M: np.ndarray) -> list[np.ndarray]:
    """Basis of {X : X M = M X}."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    L = zeros(n * n, n * n)
    for a in range(n):
        for b in range(n):
            img = zeros(n, n)
            img[a, :] = M[b, :]
            img[:, b] = F.sub[img[:, b], M[:, a]]
            L[a * n + b] = img.ravel()
    K = kernel(F, L)
    return [K[i].reshape(n, n) for i in range(K.shape[0])]


# ---------------------------------------------------------------- cyclic decomposition


def cyclic_basis(F: Field, v: np.ndarray, M: np.ndarray, length: int) -> np.ndarray:
    rows = [np.asarray(v, dtype=np.int64)]
    for _ in range(length - 1):
        rows.append(matmul(F, rows[-1][None, :], M)[0])
    return np.array(rows, dtype=np.int64)


def local_order(F: Field, v, M: np.ndarray, p: Poly, cap: int) -> int:
    """Smallest e with v p(M)^e = 0 (v assumed in the p-primary component)."""
    P = poly_eval_mat(p, M)
    w = np.asarray(v, dtype=np.int64)[None, :]
    e = 0
    while w.any():
        w = matmul(F, w, P)
        e += 1
        if e > cap:
            raise ValueError("vector is not p-primary")
    return e


def primary_component(F: Field, M: np.ndarray, p: Poly) -> np.ndarray:
    n = M.shape[0]
    return kernel(F, mpow(F, poly_eval_mat(p, M), n))


def cyclic_decomposition(F: Field, M: np.ndarray) -> list[tuple[np.ndarray, Poly, int]]:
    """V = (+) <g_i>_M with annihilators p_i^{d_i}; returns (g_i, p_i, d_i)."""
    M = np.asarray(M, dtype=np.int64)
    out = []
    for p, _ in poly_factor(min_poly(F, M)):
        W = primary_component(F, M, p)
        while W.shape[0]:
            R = restrict(F, M, W)
            PR = poly_eval_mat(p, R)
            w = W.shape[0]
            # exponent e of the module and a vector of that order
            e, Q = 0, eye(w)
            while Q.any():
                Q = matmul(F, Q, PR)
                e += 1
            Qe1 = mpow(F, PR, e - 1)
            i = next(i for i in range(w) if matmul(F, eye(w)[i][None, :], Qe1).any())
            c = eye(w)[i]
            D = e * p.degree
            U = cyclic_basis(F, c, R, D)
            target = zeros(1, D)
            target[0, D - 1] = 1
            lam = solve(F, transpose(U), target)[0]
            cols = [lam]
            for _ in range(D - 1):
                cols.append(matmul(F, R, cols[-1][:, None])[:, 0])
            Kmat = transpose(np.array(cols, dtype=np.int64))
            C = kernel(F, Kmat)
            out.append((matmul(F, c[None, :], W)[0], p, e))
            W = matmul(F, C, W) if C.shape[0] else zeros(0, M.shape[0])
    return out

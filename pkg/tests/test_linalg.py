import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biref.algebra import Poly, field_make
from biref.errors import Inconsistent, Singular
from biref.linalg import (
    EDProfile,
    Subspace,
    asmat,
    block_diag,
    centralizer_basis,
    companion,
    cyclic_decomposition,
    det,
    elementary_divisors,
    elementary_divisors_by_rank,
    eye,
    fitting_dim_phi_squared,
    inverse,
    invariant_factors,
    jordan_block,
    kernel,
    matmul,
    min_poly,
    mpow,
    rank,
    solve,
)

F3, F5 = field_make(3), field_make(5)


def P(F, *c):
    return Poly.from_ints(F, c)


def random_matrix(F, n, seed):
    return np.random.default_rng(seed).integers(0, F.q, size=(n, n))


def test_rank_and_kernel():
    assert rank(F3, eye(3)) == 3
    A = asmat(F5, [[1, 2], [2, 4]])
    assert rank(F5, A) == 1
    K = kernel(F5, A)
    assert K.shape == (1, 2)
    assert not matmul(F5, K, A).any()
    # the canonical generator is a multiple of (2, 4)
    assert Subspace(F5, K, 2) == Subspace(F5, asmat(F5, [[2, 4]]), 2)


def test_inverse_and_det():
    S = asmat(F3, [[0, 1], [1, 0]])
    assert (inverse(F3, S) == S).all()
    assert det(F3, S) == F3.minus_one
    with pytest.raises(Singular):
        inverse(F5, asmat(F5, [[1, 2], [2, 4]]))


def test_solve():
    A = asmat(F5, [[1, 2], [3, 4]])
    X = asmat(F5, [[1, 1]])
    B = matmul(F5, X, A)
    assert (solve(F5, A, B) == X).all()
    with pytest.raises(Inconsistent):
        solve(F5, asmat(F5, [[1, 2], [2, 4]]), asmat(F5, [[1, 0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_inverse_property(seed, n):
    M = random_matrix(F5, n, seed)
    if det(F5, M) == 0:
        return
    assert (matmul(F5, M, inverse(F5, M)) == eye(n)).all()


def test_min_poly_examples():
    assert min_poly(F3, eye(4)) == P(F3, -1, 1)
    f = P(F3, -1, 1) ** 2
    assert min_poly(F3, companion(f)) == f
    assert min_poly(F3, asmat(F3, [[1, 0], [0, 2]])) == P(F3, -1, 0, 1)


def test_elementary_divisor_examples():
    one = P(F3, -1, 1)
    assert elementary_divisors(F3, eye(4)).entries == ((one, 1, 4),)
    g = P(F3, 1, 0, 1)
    assert elementary_divisors(F3, companion(g**2)).entries == ((g, 2, 1),)
    J = block_diag(jordan_block(F3, 1, 2), jordan_block(F3, 1, 2))
    assert elementary_divisors(F3, J).entries == ((one, 2, 2),)
    with pytest.raises(Singular):
        elementary_divisors(F3, asmat(F3, [[0, 1], [0, 0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_elementary_divisors_two_ways(seed, n):
    """Smith form and rank sequences give the same profile."""
    M = random_matrix(F3, n, seed)
    if det(F3, M) == 0:
        return
    a = elementary_divisors(F3, M)
    assert a == elementary_divisors_by_rank(F3, M)
    assert sum(p.degree * d * m for p, d, m in a.entries) == n
    prod = P(F3, 1)
    for f in invariant_factors(F3, M):
        prod = prod * f
    assert prod.degree == n


def test_edprofile_from_pairs_and_json():
    one = P(F3, -1, 1)
    prof = EDProfile.from_pairs([(one, 2), (one, 2), (one, 1)], 5)
    assert prof.mult(one, 2) == 2
    assert prof.to_json() == [{"p": [2, 1], "d": 1, "mult": 1}, {"p": [2, 1], "d": 2, "mult": 2}]


def test_fitting_dim_examples():
    assert fitting_dim_phi_squared(F3, eye(3)) == 0
    assert fitting_dim_phi_squared(F3, (2 * eye(3)) % 3) == 0
    assert fitting_dim_phi_squared(F3, companion(P(F3, 1, 0, 1))) == 2


def test_centralizer_examples():
    assert len(centralizer_basis(F3, eye(3))) == 9
    assert len(centralizer_basis(F3, companion(P(F3, 1, 0, 1)))) == 2
    assert len(centralizer_basis(F5, asmat(F5, [[1, 0], [0, 2]]))) == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_centralizer_commutes(seed, n):
    M = random_matrix(F3, n, seed)
    for X in centralizer_basis(F3, M):
        assert (matmul(F3, X, M) == matmul(F3, M, X)).all()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_cyclic_decomposition_spans(seed, n):
    M = random_matrix(F5, n, seed)
    if det(F5, M) == 0:
        return
    pieces = cyclic_decomposition(F5, M)
    B = np.concatenate([np.stack([matmul(F5, g[None], mpow(F5, M, j))[0] for j in range(p.degree * d)])
                        for g, p, d in pieces])
    assert rank(F5, B) == n
    assert sorted((p.coeffs, d) for _, p, d in pieces) == sorted(
        (p.coeffs, d) for p, d, m in elementary_divisors(F5, M).entries for _ in range(m)
    )


def test_subspace_lattice():
    U = Subspace(F3, asmat(F3, [[1, 0, 0]]), 3)
    W = Subspace(F3, asmat(F3, [[0, 1, 0]]), 3)
    assert (U + W).dim == 2 and (U & W).dim == 0
    assert U <= U + W
    assert Subspace.whole(F3, 3).contains([1, 2, 1])

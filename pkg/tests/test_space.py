import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biref.algebra import NONSQUARE, SQUARE, Poly, class_of_minus_one, field_make
from biref.errors import Degenerate, DescentFails, NoInvariantForm, NotNested
from biref.linalg import Subspace, asmat, companion, det, eye, matmul, rank, transpose
from biref.space import (
    BilinearSpace,
    discriminant,
    induced_form,
    invariant_form_for,
    is_hyperbolic,
    isotropic_vector,
    orthogonal_basis,
    orthogonal_complement,
    vectors,
    witt_decomposition,
    witt_index,
)

F3, F5 = field_make(3), field_make(5)


def brute_witt_index(S):
    """Largest totally isotropic subspace by depth-first search over isotropic vectors."""
    F = S.field
    iso = [v for v in vectors(F, S.dim)[1:] if S.q(v) == 0]

    def grow(basis, start):
        best = len(basis)
        for i in range(start, len(iso)):
            v = iso[i]
            if any(S.f(v, b) for b in basis):
                continue
            if rank(F, np.array(basis + [v])) == len(basis) + 1:
                best = max(best, grow(basis + [v], i + 1))
                if best == S.dim // 2:
                    return best
        return best

    return grow([], 0)


def test_discriminant_examples():
    assert discriminant(BilinearSpace(F3, eye(2))) is SQUARE
    assert discriminant(BilinearSpace.hyperbolic(F3, 1)) is NONSQUARE
    assert discriminant(BilinearSpace(F3, asmat(F3, [[1, 0], [0, 2]]))) is NONSQUARE


def test_witt_index_examples():
    assert witt_index(BilinearSpace.hyperbolic(F3, 1)) == 1
    assert witt_index(BilinearSpace(F3, eye(2))) == 0
    assert witt_index(BilinearSpace(F3, eye(3))) == 1
    assert is_hyperbolic(BilinearSpace.hyperbolic(F3, 1))
    assert not is_hyperbolic(BilinearSpace(F3, eye(2)))
    assert is_hyperbolic(BilinearSpace(F5, eye(2)))


@pytest.mark.parametrize("q", [3, 5])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("disc", [SQUARE, NONSQUARE])
def test_witt_index_matches_brute_force(q, n, disc):
    F = field_make(q)
    S = BilinearSpace.standard(F, n, disc)
    w = witt_index(S)
    assert w == brute_witt_index(S)
    # finite-field classification: only even dims with the "wrong" disc lose one
    hyper_disc = class_of_minus_one(F) if (n // 2) % 2 else SQUARE
    expected = n // 2 - (1 if n % 2 == 0 and disc is not hyper_disc else 0)
    assert w == expected


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(2, 6), st.integers(0, 10**6))
def test_witt_decomposition_is_valid(q, n, seed):
    F = field_make(q)
    rng = np.random.default_rng(seed)
    while True:
        A = rng.integers(0, q, size=(n, n))
        G = (A + A.T) % q
        if det(F, G):
            break
    S = BilinearSpace(F, G)
    pairs, W = witt_decomposition(S)
    for v, w in pairs:
        assert S.q(v) == 0 and S.q(w) == 0 and S.f(v, w) == 1
    aniso = BilinearSpace(F, S.gram_of(W)) if W.shape[0] else None
    if aniso is not None:
        assert isotropic_vector(aniso) is None
    assert 2 * len(pairs) + W.shape[0] == n


def test_orthogonal_complement_examples():
    H = BilinearSpace.hyperbolic(F3, 1)
    line = asmat(F3, [[1, 0]])
    assert orthogonal_complement(H, line) == Subspace(F3, line, 2)
    E = BilinearSpace(F3, eye(2))
    assert orthogonal_complement(E, asmat(F3, [[1, 0]])) == Subspace(F3, asmat(F3, [[0, 1]]), 2)
    assert orthogonal_complement(E, eye(2)).dim == 0


def test_orthogonal_basis_diagonalises():
    S = BilinearSpace.hyperbolic(F5, 2)
    B = orthogonal_basis(S)
    G = S.gram_of(B)
    assert (G == np.diag(np.diag(G))).all() and det(F5, G)


def test_induced_form_examples():
    S = BilinearSpace(F3, eye(3))
    V = Subspace.whole(F3, 3)
    Z = Subspace.zero(F3, 3)
    Q = induced_form(S, V, Z)
    assert Q.dim == 3 and discriminant(Q) is discriminant(S)
    H = BilinearSpace.hyperbolic(F3, 1)
    L = Subspace(F3, asmat(F3, [[1, 0]]), 2)
    assert induced_form(H, L, L).dim == 0
    with pytest.raises(NotNested):
        induced_form(H, L, Subspace(F3, asmat(F3, [[0, 1]]), 2))
    with pytest.raises(DescentFails):
        induced_form(H, L, Subspace.zero(F3, 2))


def test_invariant_form_examples():
    assert (invariant_form_for(F3, eye(3)).gram == eye(3)).all()
    M = companion(Poly.from_ints(F3, [1, 0, 1]))
    S = invariant_form_for(F3, M)
    assert (matmul(F3, matmul(F3, M, S.gram), transpose(M)) == S.gram).all()
    with pytest.raises(NoInvariantForm):
        invariant_form_for(F5, asmat(F5, [[2, 0], [0, 4]]))


def test_degenerate_space_rejected():
    with pytest.raises(Degenerate):
        BilinearSpace(F3, asmat(F3, [[1, 1], [1, 1]]))

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biref.algebra import NONSQUARE, SQUARE, Poly, field_make
from biref.classify import (
    biref_in_Omega,
    biref_in_SO,
    check_eta_reversal,
    classify,
    condition_c1,
    condition_c2,
    find_witness,
    n_counts,
    omega_conditions,
    r_profile,
    reversible_in_Omega,
    sl_biref,
    sl_reversible,
)
from biref.errors import (
    EtaSquareNotMinusOne,
    NotAReversal,
    NotInOmega,
    NotReversibleInGL,
    NotSL,
    WrongDimensionClass,
    WrongFieldBranch,
)
from biref.linalg import asmat, block_diag, companion, eye, matmul, scalar
from biref.oracle import element_certificate, sl_exhaustive, sl_reading_check, sl_reversible_by_cosets
from biref.ortho import (
    BlockSpec,
    Isometry,
    build_block,
    build_from_specs,
    identity,
    minus_identity,
    random_element,
    random_isometry,
    rprofile_example,
)
from biref.space import BilinearSpace

F3, F5 = field_make(3), field_make(5)


def test_n_counts_examples():
    _, phi = build_from_specs(
        F3, [BlockSpec("type2pm", 1, 1, SQUARE), BlockSpec("type2pm", 1, 2, SQUARE), BlockSpec("type1", 1, m=2)]
    )
    c = n_counts(phi)
    assert (c[3], c[5], c[2], c[1], c.fitting2) == (1, 1, 2, 0, 0)
    assert n_counts(identity(BilinearSpace(F3, eye(4))))[1] == 4
    _, psi = build_block(F3, BlockSpec("type2", poly=(1, 0, 1), d=2))
    c = n_counts(psi)
    assert all(c[j] == 0 for j in range(1, 9)) and c.fitting2 == 4


def test_biref_in_SO_examples():
    assert biref_in_SO(identity(BilinearSpace(F3, eye(3))))
    S = BilinearSpace(F3, eye(2))
    rot = Isometry(S, asmat(F3, [[0, 1], [2, 0]]))  # x^2 + 1
    assert not biref_in_SO(rot)
    H = BilinearSpace.hyperbolic(F3, 3)
    rng = random.Random(6)
    for _ in range(20):
        assert biref_in_SO(random_element(H, "SO", rng))


def test_c2_mixed_discs_example():
    S = BilinearSpace(F3, eye(4))
    phi = Isometry(S, np.diag([2, 2, 1, 1]))
    assert phi.det == 1 and phi.spinor_norm is SQUARE
    assert condition_c2(phi)
    assert biref_in_Omega(phi)
    assert element_certificate(phi).biref_Omega


def test_biref_in_Omega_examples():
    assert biref_in_Omega(identity(BilinearSpace(F3, eye(3))))
    H2 = BilinearSpace.hyperbolic(F3, 2)
    assert minus_identity(H2).spinor_norm is SQUARE
    assert biref_in_Omega(minus_identity(H2))
    with pytest.raises(NotInOmega):
        biref_in_Omega(minus_identity(BilinearSpace.hyperbolic(F3, 1)))


def test_omega_conditions_need_q_3_mod_4():
    with pytest.raises(WrongFieldBranch):
        omega_conditions(identity(BilinearSpace(F5, eye(3))))


def test_rprofile_examples():
    S, phi = rprofile_example(3)
    assert r_profile(phi) and not biref_in_Omega(phi) and reversible_in_Omega(phi)
    assert not r_profile(identity(BilinearSpace(F3, eye(6))))
    x2p1 = BlockSpec("type2", poly=(1, 0, 1), d=1)
    _, psi = build_from_specs(F3, [x2p1, x2p1, BlockSpec("type2pm", 1, 1, SQUARE)])
    assert psi.spinor_norm is SQUARE
    assert condition_c1(psi) and not r_profile(psi)


def test_classify_verdict_json():
    v = classify(identity(BilinearSpace(F3, eye(3))))
    j = v.to_json()
    assert j["biref_Omega"] is True and j["reversible_Omega"] is True and j["in_omega"] is True
    assert set(j) >= {"det", "spinor_norm", "in_omega", "dim", "disc", "n_counts", "C1", "C2", "C3", "r_profile",
                      "biref_O", "biref_SO", "biref_Omega", "reversible_Omega", "witness"}
    v = classify(minus_identity(BilinearSpace.hyperbolic(F3, 1)))
    assert v.in_omega is False and v.biref_Omega is None and "not in Omega" in v.reason


def test_witness_is_a_factorisation():
    S = BilinearSpace.standard(F3, 4, NONSQUARE)
    rng = random.Random(3)
    for _ in range(10):
        phi = random_element(S, "Omega", rng)
        sig, tau = find_witness(phi)
        for x in (sig, tau):
            assert (matmul(F3, x, x) == eye(4)).all()
            g = Isometry(S, x)
            assert g.det == 1 and g.spinor_norm is SQUARE
        assert (matmul(F3, sig, tau) == phi.matrix).all()


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(3, 4, NONSQUARE), (3, 5, SQUARE), (5, 4, SQUARE), (3, 6, SQUARE)]), st.integers(0, 10**6))
def test_verdict_is_conjugation_invariant(cell, seed):
    q, n, disc = cell
    F = field_make(q)
    S = BilinearSpace.standard(F, n, disc)
    rng = random.Random(seed)
    phi = random_element(S, "Omega", rng)
    g = random_isometry(S, rng)
    psi = Isometry(S, matmul(F, matmul(F, g.inverse().matrix, phi.matrix), g.matrix))
    a, b = classify(phi).to_json(), classify(psi).to_json()
    assert a == b


def test_eta_reversal():
    S = BilinearSpace(F3, eye(2))
    eta = Isometry(S, asmat(F3, [[0, 1], [2, 0]]))
    assert (matmul(F3, eta.matrix, eta.matrix) == scalar(F3, 2, 2)).all()
    v = check_eta_reversal(identity(S), eta, assume_in_omega=True)
    assert v.biref_Omega
    with pytest.raises(EtaSquareNotMinusOne):
        check_eta_reversal(identity(S), identity(S), assume_in_omega=True)
    # eta4 commutes with phi, and phi has order 4, so eta4 cannot invert it
    S4 = BilinearSpace(F3, eye(4))
    eta4 = Isometry(S4, block_diag(eta.matrix, eta.matrix))
    phi = Isometry(S4, block_diag(eta.matrix, eye(2)))
    with pytest.raises(NotAReversal):
        check_eta_reversal(phi, eta4)


def test_sl_predicates_examples():
    assert sl_biref(F3, eye(2))
    x2p1 = companion(Poly.from_ints(F3, [1, 0, 1]))
    assert not sl_biref(F3, x2p1)
    j2 = companion(Poly.from_ints(F3, [-1, 1]) ** 2)
    assert sl_biref(F3, block_diag(j2, j2))
    assert sl_reversible(F5, companion(Poly.from_ints(F5, [1, 0, 1])))
    with pytest.raises(NotSL):
        sl_biref(F3, scalar(F3, 2, 3))
    with pytest.raises(NotReversibleInGL):
        sl_biref(F5, np.diag([2, 2, 4]))
    with pytest.raises(WrongDimensionClass):
        sl_reversible(F3, eye(4))


def test_sl_dim6_with_odd_pm_blocks():
    # (x-1)^3, (x+1), (x+1), (x-1): det 1 and odd +-1 blocks
    one, minus = Poly.from_ints(F3, [-1, 1]), Poly.from_ints(F3, [1, 1])
    M = block_diag(companion(one**3), companion(minus), companion(minus), companion(one))
    assert sl_biref(F3, M) and sl_reversible(F3, M)


@pytest.mark.parametrize("q", [3, 5])
def test_sl2_adopted_reading_matches_brute_force(q):
    rows = sl_exhaustive(field_make(q), 2)
    for r in rows:
        if r["gl_reversible"]:
            assert r["pred_biref"] == r["biref"]
            assert r["pred_reversible"] == r["reversible"]


def test_sl2_alternative_reading_disagrees_on_scalars():
    rows = sl_exhaustive(F3, 2, reading="odd-multiplicity")
    bad = [r for r in rows if r["gl_reversible"] and r["pred_reversible"] != r["reversible"]]
    assert sorted(r["matrix"] for r in bad) == [[[1, 0], [0, 1]], [[2, 0], [0, 2]]]
    assert not sl_reversible(F3, scalar(F3, 2, 2), reading="odd-multiplicity")
    assert sl_reversible(F3, scalar(F3, 2, 2))


def test_sl6_sampled_readings_against_coset_oracle():
    rep = sl_reading_check(F3, 6, 200, random.Random(0), max_space=3**9)
    assert (rep["instances"], rep["skipped"]) == (93, 107)
    assert rep["mismatches"] == {"nonsquare-polynomial": 0, "odd-multiplicity": 5}


def test_coset_oracle_on_sl2():
    for r in sl_exhaustive(F3, 2):
        if r["gl_reversible"]:
            assert sl_reversible_by_cosets(F3, np.array(r["matrix"])) == r["reversible"]

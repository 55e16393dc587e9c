"""The eight acceptance criteria.  Each test prints one PASS/FAIL line (also
collected in the "acceptance criteria" section of the pytest summary)."""

import random
import time

import numpy as np
import pytest

from biref import NONSQUARE, SQUARE, BilinearSpace, BirefError, Isometry, SquareClass, field_make
from biref.algebra import class_of_minus_one, square_class
from biref.errors import CentralizerTooLarge
from biref.classify import biref_in_Omega, check_eta_reversal, classify, r_profile
from biref.linalg import eye, inverse, matmul, scalar
from biref.oracle import (
    commutator_subgroup,
    cor53_check,
    element_certificate,
    exhaustive_classify,
    involution_theta_check,
    order_O,
    property_suite,
    sl_exhaustive,
    suite_lemma_disc,
    verify_table,
)
from biref.ortho import (
    orthogonal_decompose,
    random_element,
    random_isometry,
    reflection_factors,
    reflection_matrix,
    rprofile_example,
)
from biref.space import discriminant, witt_index

from conftest import MATRIX, cell_table


def _name(q, n, d):
    return f"({q},{n},{d.name.lower()})"


def test_criterion_1_exhaustive_matrix(report_line):
    t0 = time.time()
    problems = []
    total_classes = 0
    for q, n, d in MATRIX:
        T = cell_table(q, n, d)
        rep = verify_table(T)
        total_classes += len(rep.classes)
        if T.order != order_O(q, n, d):
            problems.append(f"{_name(q, n, d)} order {T.order}")
        if witt_index(T.space) >= 1 and not rep.omega_matches_kernel:
            problems.append(f"{_name(q, n, d)} commutator closure != SO & ker Theta")
        if rep.mismatches:
            problems.append(f"{_name(q, n, d)} {rep.mismatches} class mismatches")
    elapsed = time.time() - t0
    ok = not problems and elapsed <= 300
    report_line(
        f"criterion 1 (exhaustive agreement, {len(MATRIX)} cells, {total_classes} O-classes, {elapsed:.0f}s): "
        + ("PASS" if ok else f"FAIL {problems or 'runtime'}")
    )
    assert not problems
    assert elapsed <= 300


def test_criterion_2_rprofile_witness(report_line):
    t0 = time.time()
    S, phi = rprofile_example(3)
    ed = sorted((list(p.coeffs), d, m) for p, d, m in phi.elementary_divisors().entries)
    cert = element_certificate(phi)
    elapsed = time.time() - t0
    ok = (
        phi.dim == 6
        and ed == [([2, 1], 1, 2), ([2, 1], 2, 2)]
        and cert.reversible_Omega is True
        and cert.biref_Omega is False
        and r_profile(phi) is True
        and biref_in_Omega(phi) is False
        and elapsed <= 60
    )
    report_line(
        f"criterion 2 (reversible, not bireflectional, q=3 dim 6; {cert.reversers} reversers, "
        f"{cert.involutive_reversers} involutive, {elapsed:.1f}s): " + ("PASS" if ok else "FAIL")
    )
    assert ok


def test_criterion_3_corollary_cell(report_line):
    F = field_make(3)
    T = cell_table(3, 4, class_of_minus_one(F))
    omega = commutator_subgroup(T)
    certs = exhaustive_classify(T, omega)
    om_classes = [c for c in certs if c.biref_Omega is not None]
    bad = [c for c in om_classes if not c.biref_Omega]
    pred_bad = [c for c in om_classes if not classify(Isometry(T.space, c.matrix)).biref_Omega]
    ok = not bad and not pred_bad and om_classes
    report_line(
        f"criterion 3 (q=3 dim 4 disc -1: {len(om_classes)} Omega-classes, |Omega|={int(omega.sum())}, "
        f"{len(bad)} not bireflectional): " + ("PASS" if ok else "FAIL")
    )
    assert ok


def _whole_group_condition(q, n, disc_is_minus_one):
    return (q % 4 == 1 and n % 4 != 2) or (n % 4 == 0 and disc_is_minus_one) or n in (8, 9)


def test_criterion_4_whole_group_reconciliation(report_line):
    disagree = []
    for q, n, d in MATRIX:
        T = cell_table(q, n, d)
        omega = commutator_subgroup(T)
        all_true = all(c.biref_Omega for c in exhaustive_classify(T, omega) if c.biref_Omega is not None)
        cond = _whole_group_condition(q, n, d is class_of_minus_one(T.field))
        if all_true != cond:
            disagree.append(f"{_name(q, n, d)} all_biref={all_true} condition={cond} |Omega|={int(omega.sum())}")

    # dim 8 clause: sampled certificates at q = 3, both discriminants
    F = field_make(3)
    sampled = failed = skipped = 0
    for d in (SQUARE, NONSQUARE):
        S = BilinearSpace.standard(F, 8, d)
        rng = random.Random(8)
        got = 0
        while got < 50:
            phi = random_element(S, "Omega", rng, pairs=8)
            try:
                cert = element_certificate(phi, cap_dim=16)
            except CentralizerTooLarge:
                skipped += 1
                continue
            got += 1
            sampled += 1
            if not (cert.biref_Omega and classify(phi).biref_Omega):
                failed += 1
    ok = not disagree and failed == 0
    report_line(
        f"criterion 4 (whole-group conditions vs matrix; dim 8: {sampled} sampled, {failed} failed, "
        f"{skipped} skipped by cap): " + ("PASS" if ok else f"FAIL cells disagreeing: {disagree}")
    )
    assert failed == 0
    assert not disagree, disagree


def test_criterion_5_spinor_norm(report_line):
    bad_decomp = bad_oracle = bad_mult = bad_invol = 0
    for q, n, d in MATRIX:
        T = cell_table(q, n, d)
        S = T.space
        F = S.field
        rng = random.Random(1000 * q + 10 * n + (d is SQUARE))
        for i in range(1000):
            phi = random_isometry(S, rng)
            thetas = []
            for r in (None, random.Random(i)):
                vs = reflection_factors(phi, rng=r)
                P = eye(n)
                for v in vs:
                    P = matmul(F, reflection_matrix(S, v), P)
                if not (P == phi.matrix).all():
                    bad_decomp += 1
                thetas.append(SquareClass.product(square_class(F, S.q(v)) for v in vs))
            label = SQUARE if T.theta_sign[T.lookup(phi.matrix[None])[0]] == 1 else NONSQUARE
            if thetas[0] is not thetas[1]:
                bad_decomp += 1
            if thetas[0] is not label:
                bad_oracle += 1
        for _ in range(1000):
            a, b = random_isometry(S, rng), random_isometry(S, rng)
            if (a @ b).spinor_norm is not a.spinor_norm * b.spinor_norm:
                bad_mult += 1
        bad_invol += involution_theta_check(T)
    total = bad_decomp + bad_oracle + bad_mult + bad_invol
    report_line(
        f"criterion 5 (spinor norm: decompositions {bad_decomp}, oracle labels {bad_oracle}, "
        f"multiplicativity {bad_mult}, involutions {bad_invol} violations): " + ("PASS" if total == 0 else "FAIL")
    )
    assert total == 0


def test_criterion_6_lemma_suites(report_line):
    t0 = time.time()
    reps = {name: property_suite(name) for name in ("lemma-inv2", "lemma-inv3", "lemma-inv4", "lemma-disc")}
    # the disc identity also on every 2- summand met among the enumerated class representatives
    phis = []
    for q, n, d in MATRIX:
        T = cell_table(q, n, d)
        phis += [Isometry(T.space, T.elements[i], validate=False) for i in T.class_reps() if T.det_sign[i] == 1]
    reps["lemma-disc (matrix classes)"] = suite_lemma_disc(phis)
    elapsed = time.time() - t0
    viol = sum(r["violations"] for r in reps.values())
    empty = [k for k, r in reps.items() if r["instances"] == 0]
    ok = viol == 0 and not empty and elapsed <= 120
    detail = ", ".join(f"{k} {r['instances']}/{r['violations']}" for k, r in reps.items())
    report_line(f"criterion 6 (instances/violations: {detail}; {elapsed:.0f}s): " + ("PASS" if ok else "FAIL"))
    assert ok


def _eta_pairs(T):
    """All (eta, phi) with eta^2 = -1, phi in Omega and eta^-1 phi eta = phi^-1."""
    F = T.field
    n = T.space.dim
    E = T.elements
    minus = scalar(F, F.minus_one, n)
    etas = np.flatnonzero((matmul(F, E, E) == minus).all(axis=(1, 2)))
    omega = commutator_subgroup(T)
    om_idx = np.flatnonzero(omega)
    Einv = np.array([inverse(F, E[i]) for i in om_idx])
    pairs = []
    for e in etas:
        eta = E[e]
        lhs = matmul(F, E[om_idx], eta[None])
        rhs = matmul(F, eta[None], Einv)
        for j in np.flatnonzero((lhs == rhs).all(axis=(1, 2))):
            pairs.append((int(e), int(om_idx[j])))
    return pairs, omega


def test_criterion_7_eta_reversal(report_line):
    rng = random.Random(7)
    pools = []
    for q, n, d in MATRIX:
        if n % 2:
            continue
        T = cell_table(q, n, d)
        pairs, omega = _eta_pairs(T)
        if pairs:
            # oracle verdict per O-class (Omega is normal in O)
            biref = {int(T.classes[i]): c.biref_Omega for i, c in zip(T.class_reps(), exhaustive_classify(T, omega))}
            pools.append((T, omega, pairs, biref))
    violations = 0
    for k in range(200):
        T, omega, pairs, biref = pools[k % len(pools)]
        e, i = pairs[rng.randrange(len(pairs))]
        S = T.space
        eta = Isometry(S, T.elements[e], validate=False)
        phi = Isometry(S, T.elements[i], validate=False)
        assume = bool(omega[i]) if witt_index(S) == 0 else None
        try:
            check_eta_reversal(phi, eta, assume_in_omega=assume)
        except BirefError:
            violations += 1
            continue
        if not biref[int(T.classes[i])]:
            violations += 1
    cells = " ".join(_name(T.field.q, T.space.dim, discriminant(T.space)) for T, *_ in pools)
    report_line(
        f"criterion 7 (eta^2 = -1 reversals: 200 pairs over cells {cells}, {violations} violations): "
        + ("PASS" if violations == 0 else "FAIL")
    )
    assert violations == 0


def test_criterion_8_special_linear(report_line):
    t0 = time.time()
    problems = []
    for q, order in ((3, 24), (5, 120)):
        F = field_make(q)
        rows = sl_exhaustive(F, 2)
        if sum(r["class_size"] for r in rows) != order:
            problems.append(f"|SL(2,{q})|")
        for r in rows:
            if not r["gl_reversible"]:
                continue
            if r["pred_biref"] != r["biref"]:
                problems.append(f"biref q={q} {r['matrix']}")
            if r["pred_reversible"] != r["reversible"]:
                problems.append(f"reversible q={q} {r['matrix']}")
    cor = cor53_check(field_make(3), 4, 500, random.Random(53))
    if cor["violations"] or cor["instances"] != 500:
        problems.append(f"fix/neg dimension: {cor}")
    elapsed = time.time() - t0
    report_line(
        f"criterion 8 (SL(2,3), SL(2,5) classes; GL(4,3) {cor['instances']} samples, "
        f"{cor['bireflectional']} with reversing involutions; {elapsed:.0f}s): "
        + ("PASS" if not problems else f"FAIL {problems}")
    )
    assert not problems

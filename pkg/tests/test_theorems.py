import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qorth.canonical import canonical_N, random_class_N_angles
from qorth.core import I2, I4, SIGMA, SWAP, haar_random_unitary
from qorth.kak import local_dressing
from qorth.pauli import pauli_matrix
from qorth.subalgebra import A0, B, conjugate, from_pauli_triple, from_unitary, overlap
from qorth.theorems import (
    PAULI_FOUR_FAMILY, a0_conjugator, cond_exp_N_direct, cond_exp_N_formula,
    cond_exp_coefficient, direction_report, family_audit, gauge_fix, pauli_overlap_sums,
    overlap_formula, pauli_four_family, projector_overlap_crosscheck, subalgebra_from_angles,
    theorem_trois_check,
)

Q = math.pi / 4
angle = st.floats(-4, 4, allow_nan=False)
triples = st.tuples(angle, angle, angle)


def test_cond_exp_examples():
    assert cond_exp_coefficient(1, (0, 0, 0)) == 0
    c, p = cond_exp_N_formula(1, (Q, Q, Q))
    assert c == pytest.approx(1) and p.letters == "XI"
    assert np.allclose(cond_exp_N_direct(1, (Q, Q, Q)), np.kron(SIGMA[1], I2))
    for g in (-1.0, 0.0, 0.4, 2.0):
        assert cond_exp_coefficient(3, (Q, Q, g)) == pytest.approx(1)


@given(triples)
def test_cond_exp_closed_forms(a):
    for i in (1, 2, 3):
        c, p = cond_exp_N_formula(i, a)
        assert np.max(np.abs(c * pauli_matrix(p) - cond_exp_N_direct(i, a))) < 1e-10


def test_third_direction_resolved():
    rep = direction_report()
    assert [rep[i]["resolved"] for i in (1, 2, 3)] == ["XI", "YI", "ZI"]
    assert rep[1]["agrees"] and rep[2]["agrees"] and not rep[3]["agrees"]


def test_cond_exp_rejects_bad_generator():
    with pytest.raises(ValueError):
        cond_exp_N_direct(0, (0, 0, 0))


def test_overlap_formula_examples():
    assert overlap_formula((0, 0, 0)) == 0
    assert overlap_formula((Q, Q, 0)) == pytest.approx(1)
    assert overlap_formula((Q, Q, Q)) == pytest.approx(3)


@given(triples, st.integers(0, 10_000))
def test_overlap_formula_matches_direct(a, seed):
    rng = np.random.default_rng(seed)
    L1, L2 = haar_random_unitary(2, rng), haar_random_unitary(2, rng)
    S = subalgebra_from_angles(a, L1, L2)
    assert overlap(S, B()) == pytest.approx(overlap_formula(a), abs=1e-10)
    full, diag = pauli_overlap_sums(a)
    assert full == pytest.approx(overlap_formula(a), abs=1e-10)
    assert diag <= full + 1e-12


def test_trois_examples(rng):
    r = theorem_trois_check(SWAP)
    assert (r.is_useful, r.bound_holds) == (True, True)
    assert r.overlap_with_B == pytest.approx(3)
    W = np.kron(haar_random_unitary(2, rng), haar_random_unitary(2, rng)) @ canonical_N((Q, Q, 0))
    r = theorem_trois_check(W)
    assert r.is_useful and r.bound_holds and r.overlap_with_B == pytest.approx(1)
    r = theorem_trois_check(I4)
    assert not r.is_useful and not r.applicable


@given(st.integers(0, 100_000))
def test_useful_overlap_at_least_one(seed):
    rng = np.random.default_rng(seed)
    W = local_dressing(canonical_N(random_class_N_angles(rng)), rng)
    r = theorem_trois_check(W)
    assert r.is_useful and r.overlap_with_B >= 1 - 1e-9


def test_pauli_four_family_audit():
    rep = family_audit(pauli_four_family())
    assert rep.verdict == "valid_family"
    assert rep.budget_vs_B == pytest.approx(3)
    assert np.allclose(rep.budget_terms, 1)
    assert rep.budget_holds and rep.terms_at_least_one
    assert rep.projector_sum_norm == pytest.approx(1)
    tex = rep.to_latex()
    assert tex.startswith("\\begin{tabular}") and tex.count("\\\\") == 5


def test_singleton_family():
    rep = family_audit([A0()])
    assert rep.verdict == "valid_family" and rep.size == 1 and rep.budget_vs_B == 0


def test_audit_reports_violations():
    fam = pauli_four_family() + [from_pauli_triple("+IX", "+YY", "+YZ")]
    rep = family_audit(fam)
    assert rep.verdict == "violations" and rep.violations


@given(st.integers(0, 100_000))
def test_gauge_fix_preserves_overlaps(seed):
    U = haar_random_unitary(4, seed)
    fam = [conjugate(S, U) for S in pauli_four_family()]
    fixed, applied = gauge_fix(fam)
    assert applied
    assert overlap(fixed[0], A0()) == pytest.approx(3)
    rep = family_audit(fam)
    assert rep.gauge_fixed and rep.verdict == "valid_family"
    assert rep.budget_vs_B <= 3 + 1e-9


def test_a0_conjugator_without_stored_unitary():
    S = from_pauli_triple(*PAULI_FOUR_FAMILY[2])
    W = a0_conjugator(S)
    assert overlap(from_unitary(W), S) == pytest.approx(3)


@given(st.integers(0, 10_000))
def test_projector_crosscheck(seed):
    rng = np.random.default_rng(seed)
    S, T = from_unitary(haar_random_unitary(4, rng)), from_unitary(haar_random_unitary(4, rng))
    assert projector_overlap_crosscheck(S, T) < 1e-12

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qorth.core import CNOT, I2, I4, SIGMA, SWAP, haar_random_unitary, hs_inner, tau
from qorth.canonical import canonical_N
from qorth.pauli import PauliString, pauli_matrix
from qorth.subalgebra import (
    M2, MASA, A0, B, Subalgebra, conditional_expectation, conjugate, from_json,
    from_pauli_triple, from_unitary, is_complementary, masa_from_pauli_triple,
    masa_from_unitary, min_projection_check, minimal_projections, overlap,
    overlap_via_projectors, parse_triple_text, reduce_state, to_json, traceless_projector,
    validate,
)

seeds = st.integers(0, 100_000)
E0 = np.diag([1, 0]).astype(complex)


def same_span(S, mats):
    # every element of mats lies in span(S.basis)
    return all(abs(sum(abs(hs_inner(b, m)) ** 2 for b in S.basis) - 1) < 1e-10 for m in mats)


def test_from_unitary_examples():
    assert same_span(from_unitary(I4), [np.kron(I2, s) for s in SIGMA[1:]])
    assert same_span(from_unitary(SWAP), [np.kron(s, I2) for s in SIGMA[1:]])
    assert not is_complementary(A0(), from_unitary(CNOT))


def test_from_unitary_rejects_nonunitary():
    with pytest.raises(ValueError):
        from_unitary(np.diag([1, 1, 1, 2]))


def test_pauli_triple_examples():
    S = from_pauli_triple("+IX", "+IY", "+IZ")
    assert overlap(S, A0()) == pytest.approx(3)
    validate(from_pauli_triple("+XI", "+YX", "+ZX"))
    with pytest.raises(ValueError, match="commut"):
        from_pauli_triple("+XX", "+YZ", "+ZY")


def test_masa_triple_rejects_anticommuting():
    with pytest.raises(ValueError):
        masa_from_pauli_triple("+IX", "+IY", "+IZ")
    validate(masa_from_pauli_triple("+XX", "+YZ", "+ZY"))


def test_projector_examples():
    P = traceless_projector(A0())
    assert P.trace == pytest.approx(3)
    assert np.allclose(P.apply(np.kron(I2, SIGMA[1])), np.kron(I2, SIGMA[1]))
    Q = traceless_projector(B())
    assert np.allclose(Q.apply(np.kron(SIGMA[1], I2)), np.kron(SIGMA[1], I2))
    assert np.allclose(Q.apply(np.kron(I2, SIGMA[1])), 0)


@given(seeds)
def test_projector_idempotent_selfadjoint(seed):
    P = traceless_projector(from_unitary(haar_random_unitary(4, seed))).matrix
    assert np.max(np.abs(P @ P - P)) < 1e-10
    assert np.max(np.abs(P - P.conj().T)) < 1e-12


def test_overlap_examples():
    assert overlap(B(), B()) == pytest.approx(3)
    assert overlap(A0(), B()) == pytest.approx(0, abs=1e-15)
    S = from_unitary(canonical_N((np.pi / 4, np.pi / 4, 0)))
    assert overlap(S, B()) == pytest.approx(1)


@given(seeds)
def test_overlap_symmetric_and_projector_form(seed):
    rng = np.random.default_rng(seed)
    S = from_unitary(haar_random_unitary(4, rng))
    T = masa_from_unitary(haar_random_unitary(4, rng))
    ov = overlap(S, T)
    assert 0 <= ov <= 3 + 1e-12
    assert ov == pytest.approx(overlap(T, S), abs=1e-12)
    assert ov == pytest.approx(overlap_via_projectors(S, T), abs=1e-12)


@given(seeds)
def test_overlap_unitarily_invariant(seed):
    rng = np.random.default_rng(seed)
    S, T = from_unitary(haar_random_unitary(4, rng)), from_unitary(haar_random_unitary(4, rng))
    U = haar_random_unitary(4, rng)
    assert overlap(conjugate(S, U), conjugate(T, U)) == pytest.approx(overlap(S, T), abs=1e-10)


def test_complementary_examples():
    assert is_complementary(A0(), B())
    assert not is_complementary(A0(), A0())
    assert is_complementary(A0(), masa_from_pauli_triple("+XX", "+YZ", "+ZY"))


def test_min_projection_examples():
    P = np.kron(I2, E0)
    Q = np.kron(E0, I2)
    assert tau(P @ Q) == pytest.approx(0.25) == tau(P) * tau(Q)
    assert tau(P @ P) == pytest.approx(0.5)
    assert min_projection_check(A0(), B())
    assert not min_projection_check(A0(), A0())


@given(seeds)
def test_minimal_projections_are_projections(seed):
    S = from_unitary(haar_random_unitary(4, seed))
    for P in minimal_projections(S):
        assert np.allclose(P @ P, P, atol=1e-10)
        assert tau(P) == pytest.approx(0.5)
    M = masa_from_unitary(haar_random_unitary(4, seed))
    ps = minimal_projections(M)
    assert np.allclose(sum(ps), I4, atol=1e-10)


@given(seeds)
def test_min_projection_rule_agrees(seed):
    rng = np.random.default_rng(seed)
    U = haar_random_unitary(4, rng)
    for S, T in [(conjugate(A0(), U), conjugate(B(), U)),
                 (from_unitary(U), from_unitary(haar_random_unitary(4, rng)))]:
        assert is_complementary(S, T) == min_projection_check(S, T)


def test_conditional_expectation_on_paulis():
    for i in range(4):
        for j in range(4):
            E = conditional_expectation(B(), pauli_matrix(PauliString(i, j)))
            want = np.kron(SIGMA[i], I2) if j == 0 else np.zeros((4, 4))
            assert np.allclose(E, want)


@given(seeds)
def test_conditional_expectation_properties(seed):
    rng = np.random.default_rng(seed)
    S = from_unitary(haar_random_unitary(4, rng))
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    E = conditional_expectation(S, A)
    assert np.allclose(conditional_expectation(S, E), E)
    assert np.trace(E) == pytest.approx(np.trace(A))
    # module property E(A b) = E(A) b for b in S
    b = S.basis[1]
    assert np.allclose(conditional_expectation(S, A @ b), E @ b, atol=1e-10)


def test_reduce_state_examples():
    S = from_unitary(haar_random_unitary(4, 3))
    assert np.allclose(reduce_state(S, I4 / 4), I4 / 4)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1
    r1 = reduce_state(A0(), rho)
    assert np.allclose(r1, np.kron(I2, I2 + SIGMA[3]) / 4)
    for x in A0().basis:
        assert np.trace(rho @ x) == pytest.approx(np.trace(r1 @ x))


def test_reduce_state_rejects_bad_rho():
    with pytest.raises(ValueError):
        reduce_state(A0(), I4)
    with pytest.raises(ValueError):
        reduce_state(A0(), np.diag([2, -1, 0, 0]).astype(complex))


def test_json_roundtrip_and_shorthand():
    S = from_unitary(haar_random_unitary(4, 9))
    T = from_json(json.loads(json.dumps(to_json(S))))
    assert overlap(S, T) == pytest.approx(3)
    assert overlap(from_json("triple:+XI,+YX,+ZX"), from_pauli_triple("+XI", "+YX", "+ZX")) \
        == pytest.approx(3)
    assert from_json({"triple": ["+XX", "+YZ", "+ZY"], "kind": "MASA"}).kind == MASA
    assert parse_triple_text("triple:+XI, +YX ,+ZX") == ["+XI", "+YX", "+ZX"]


@pytest.mark.parametrize("obj", [[1], {"basis": []}, {"kind": "M2"},
                                 {"kind": "M2", "basis": [1, 2]}])
def test_json_errors(obj):
    with pytest.raises(ValueError):
        from_json(obj)


def test_validate_catches_broken_basis():
    b = A0().basis
    with pytest.raises(ValueError):
        validate(Subalgebra(M2, (b[0], b[0], b[2])))
    with pytest.raises(ValueError):
        Subalgebra("M3", b)

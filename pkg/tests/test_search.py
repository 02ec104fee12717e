import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qorth.pauli import PauliString, commutes, expand, pauli_matrix
from qorth.search import (
    FamilyPenalty, MemberParams, SearchConfig, SearchResult, canonical_images,
    continuous_search, enumerate_triples, leftover_strings, max_disjoint_family,
    member_vectors, penalty, quaternion_su2, run_restart, triple_subalgebra, triple_text,
)
from qorth.canonical import canonical_N
from qorth.core import I2, SIGMA, dagger, is_unitary
from qorth.subalgebra import A0, is_complementary, masa_from_pauli_triple, overlap
from qorth.theorems import family_audit

angle = st.floats(-4, 4, allow_nan=False)
quat = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 4).filter(
    lambda q: np.linalg.norm(q) > 0.1)


def test_catalog_has_twenty_valid_triples():
    cat = enumerate_triples()
    assert len(cat) == 20
    keys = {frozenset(p.letters for p in t) for t in cat}
    assert len(keys) == 20
    for t in cat:
        triple_subalgebra(t)  # validates closure and anticommutation


def test_maximum_family_is_four():
    size, witnesses = max_disjoint_family()
    assert size == 4
    assert len(witnesses) == 30
    assert all(len(w) == 4 for w in witnesses)
    for w in witnesses:
        assert family_audit([triple_subalgebra(t) for t in w]).verdict == "valid_family"
        left = leftover_strings(w)
        assert len(left) == 3
        assert all(commutes(p, q) for p in left for q in left)
        # the three leftovers span a MASA complementary to every member
        M = masa_from_pauli_triple(*left)
        assert all(is_complementary(M, triple_subalgebra(t)) for t in w)


def test_maximum_family_containing_a0():
    size, witnesses = max_disjoint_family(must_include=("+IX", "+IY", "+IZ"))
    assert size == 4 and len(witnesses) == 6
    for w in witnesses:
        assert [p.letters for p in w[0]] == ["IX", "IY", "IZ"]
    assert triple_text(witnesses[0][0]) == ["+IX", "+IY", "+IZ"]


def test_must_include_unknown_triple():
    with pytest.raises(ValueError):
        max_disjoint_family(must_include=("+XX", "+YY", "+ZZ"))


@given(angle, angle, angle)
def test_canonical_images_closed_form(a, b, g):
    N = canonical_N((a, b, g))
    C = canonical_images(np.array([a, b, g]))[0]
    for i in range(3):
        img = N @ np.kron(I2, SIGMA[i + 1]) @ dagger(N)
        assert np.max(np.abs(expand(img) - C[i])) < 1e-12


@given(quat)
def test_quaternion_su2(q):
    U = quaternion_su2(q)
    assert is_unitary(U) and abs(np.linalg.det(U) - 1) < 1e-12


@given(st.integers(0, 10_000))
def test_fast_penalty_matches_slow(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 6))
    x = rng.normal(size=11 * (k - 1))
    members = [MemberParams.from_vector(r) for r in x.reshape(-1, 11)]
    assert FamilyPenalty(k)(x) == pytest.approx(penalty(members), abs=1e-10)
    V = member_vectors(x)
    assert np.allclose(np.einsum("mik,mjk->mij", V, V), np.eye(3), atol=1e-12)


def test_member_params_roundtrip():
    m = MemberParams((0.1, 0.2, 0.3), (1, 0, 0, 0), (0, 1, 0, 0))
    assert np.allclose(MemberParams.from_vector(m.vector()).vector(), m.vector())
    assert is_unitary(m.unitary())


def test_config_validation():
    for bad in (dict(k=1), dict(restarts=0), dict(max_iters=0), dict(shrink=0)):
        with pytest.raises(ValueError):
            SearchConfig(**bad).validate()


def test_restart_is_deterministic():
    cfg = SearchConfig(k=3, restarts=1, max_iters=400)
    a, xa, la = run_restart(cfg, 2)
    b, xb, lb = run_restart(cfg, 2)
    assert a == b and np.array_equal(xa, xb) and la == lb


def test_small_search_finds_three_family():
    res = continuous_search(SearchConfig(k=3, restarts=3, max_iters=4000, target=1e-20))
    assert res.best_penalty <= 1e-10
    fam = res.subalgebras()
    assert len(fam) == 3
    rep = family_audit(fam)
    assert rep.verdict == "valid_family"
    assert min(rep.budget_terms) >= 1 - 1e-9
    best = min(res.per_restart_log, key=lambda e: e["penalty"])
    again = SearchResult.family_from_params(best["params"])
    assert overlap(again[1], fam[1]) == pytest.approx(3, abs=1e-8)


def test_search_result_json():
    res = continuous_search(SearchConfig(k=2, restarts=2, max_iters=300))
    body = res.to_json()
    assert set(body) == {"best_penalty", "family", "per_restart_log", "config"}
    assert len(body["per_restart_log"]) == 2 and body["config"]["k"] == 2

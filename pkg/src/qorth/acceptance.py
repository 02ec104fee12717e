"""Acceptance checks, shared by the test-suite and ``qorth selftest``.

Each ``criterion_*`` function runs one check at its pinned tolerance and
returns a :class:`CriterionResult`; nothing here raises on failure.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .canonical import in_class_N, is_useful, random_class_N_angles, canonical_N
from .core import haar_random_unitary
from .kak import kak_decompose, local_dressing
from .search import (
    SearchConfig, continuous_search, enumerate_triples, leftover_strings,
    max_disjoint_family, triple_subalgebra,
)
from .pauli import commutes, pauli_matrix
from .subalgebra import (
    A0, conjugate, from_pauli_triple, from_unitary, is_complementary,
    masa_from_pauli_triple, masa_from_unitary, min_projection_check,
)
from .theorems import (
    cond_exp_N_direct, cond_exp_N_formula, direction_report, family_audit,
    pauli_overlap_sums, overlap_formula, theorem_trois_check,
)

GRID = np.linspace(-math.pi / 2, math.pi / 2, 20)


@dataclass
class CriterionResult:
    number: str
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number}: {self.name} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "seconds": round(self.seconds, 3), "details": self.details}


def _timed(number, name, fn):
    t0 = time.perf_counter()
    passed, details = fn()
    return CriterionResult(number, name, bool(passed), details, time.perf_counter() - t0)


def sample_unitaries(seed: int = 0, n_haar: int = 500, n_class: int = 500):
    """Haar-random unitaries followed by locally dressed class-N unitaries."""
    rng = np.random.default_rng(seed)
    haar = [haar_random_unitary(4, rng) for _ in range(n_haar)]
    constructed = [local_dressing(canonical_N(random_class_N_angles(rng)), rng)
                   for _ in range(n_class)]
    return haar, constructed


def criterion_1(seed: int = 0):
    def run():
        t0 = time.perf_counter()
        haar, constructed = sample_unitaries(seed)
        disagreements = 0
        useful_count = 0
        for W in haar + constructed:
            u = is_useful(W, 1e-8)
            c = is_complementary(A0(), from_unitary(W), 1e-8)
            useful_count += u
            disagreements += u != c
        t = time.perf_counter() - t0
        return disagreements == 0 and t < 10, {
            "samples": len(haar) + len(constructed), "useful": int(useful_count),
            "disagreements": int(disagreements), "eps": 1e-8, "runtime_limit_s": 10}
    return _timed("1", "useful <=> complementary to A0", run)


def criterion_2(seed: int = 0):
    def run():
        t0 = time.perf_counter()
        rng = np.random.default_rng(seed + 1)
        errs = []
        for _ in range(1000):
            errs.append(kak_decompose(haar_random_unitary(4, rng)).reconstruction_error)
        drift = 0.0
        for _ in range(200):
            W = haar_random_unitary(4, rng)
            a = np.array(kak_decompose(W).angles.as_tuple())
            b = np.array(kak_decompose(local_dressing(W, rng)).angles.as_tuple())
            drift = max(drift, float(np.max(np.abs(a - b))))
        t = time.perf_counter() - t0
        ok = max(errs) <= 1e-8 and float(np.median(errs)) <= 1e-11 and drift <= 1e-8 and t < 30
        return ok, {"max_error": max(errs), "median_error": float(np.median(errs)),
                    "angle_drift": drift, "runtime_limit_s": 30}
    return _timed("2", "KAK round-trip and local invariance", run)


def criterion_3(seed: int = 0):
    def run():
        haar, constructed = sample_unitaries(seed)
        disagreements = 0
        for W in haar + constructed:
            u = is_useful(W, 1e-7)
            c = in_class_N(kak_decompose(W).angles, 1e-7)
            disagreements += u != c
        return disagreements == 0, {"samples": len(haar) + len(constructed),
                                    "disagreements": int(disagreements), "tol": 1e-7}
    return _timed("3", "useful <=> class-N KAK angles", run)


def criterion_4(seed: int = 0):
    def run():
        rng = np.random.default_rng(seed + 3)
        min_ov = math.inf
        bound_ok = True
        for _ in range(500):
            W = local_dressing(canonical_N(random_class_N_angles(rng)), rng)
            r = theorem_trois_check(W)
            min_ov = min(min_ov, r.overlap_with_B)
            bound_ok &= r.is_useful and r.bound_holds
        worst = 0.0
        for a in GRID:
            for b in GRID:
                for g in GRID:
                    full, _ = pauli_overlap_sums((a, b, g))
                    worst = max(worst, abs(overlap_formula((a, b, g)) - full))
        ok = bound_ok and min_ov >= 1 - 1e-9 and worst <= 1e-9
        return ok, {"min_overlap_with_B": min_ov, "formula_vs_sum_max_error": worst,
                    "grid_points": len(GRID) ** 3}
    return _timed("4", "Tr PQ >= 1 and the overlap formula", run)


def criterion_5():
    def run():
        worst = 0.0
        for a in GRID:
            for b in GRID:
                for g in GRID:
                    for i in (1, 2, 3):
                        coeff, p = cond_exp_N_formula(i, (a, b, g))
                        direct = cond_exp_N_direct(i, (a, b, g))
                        worst = max(worst, float(np.max(np.abs(coeff * pauli_matrix(p) - direct))))
        report = direction_report()
        return worst <= 1e-10, {"max_error": worst, "directions": report,
                                "grid_points": len(GRID) ** 3}
    return _timed("5", "conditional-expectation closed forms", run)


def criterion_6a():
    def run():
        t0 = time.perf_counter()
        catalog = enumerate_triples()
        size, witnesses = max_disjoint_family(catalog)
        verdicts = [family_audit([triple_subalgebra(t) for t in w]).verdict for w in witnesses]
        leftovers_masa = all(
            all(commutes(p, q) for p in leftover_strings(w) for q in leftover_strings(w))
            for w in witnesses)
        t = time.perf_counter() - t0
        ok = (len(catalog) == 20 and size == 4 and "valid_family" in verdicts
              and leftovers_masa and t < 1.0)
        return ok, {"catalog_size": len(catalog), "max_size": size,
                    "witnesses": len(witnesses), "leftover_triples_commute": leftovers_masa,
                    "runtime_limit_s": 1.0}
    return _timed("6a", "discrete maximum family", run)


def criterion_6b(seed: int = 0, progress=None):
    def run():
        t0 = time.perf_counter()
        r4 = continuous_search(SearchConfig(k=4, restarts=50, seed=seed, max_iters=20_000,
                                            target=1e-20), progress)
        r5 = continuous_search(SearchConfig(k=5, restarts=100, seed=seed, max_iters=5_000,
                                            target=1e-20), progress)
        floor = min(entry["penalty"] for entry in r5.per_restart_log)
        t = time.perf_counter() - t0
        ok = r4.best_penalty <= 1e-10 and floor >= 1e-3 and t < 300
        audit = family_audit(r4.subalgebras())
        return ok and audit.verdict == "valid_family", {
            "k4_best_penalty": r4.best_penalty,
            "k4_successful_restarts": sum(e["penalty"] <= 1e-10 for e in r4.per_restart_log),
            "k5_best_penalty": r5.best_penalty, "k5_min_penalty": floor,
            "k5_penalty_tol": 1e-3, "runtime_s": t, "runtime_limit_s": 300,
            "_k4_result": r4}
    return _timed("6b", "continuous search: k=4 feasible, k=5 not", run)


def criterion_7(k4_result=None, seed: int = 0):
    def run():
        families = []
        _, witnesses = max_disjoint_family()
        families += [[triple_subalgebra(t) for t in w] for w in witnesses]
        r4 = k4_result or continuous_search(SearchConfig(k=4, restarts=10, seed=seed,
                                                         target=1e-20))
        for entry in r4.per_restart_log:
            if entry["penalty"] <= 1e-10:
                families.append(r4.family_from_params(entry["params"]))
        worst_budget, worst_term = -math.inf, math.inf
        ok = True
        for fam in families:
            rep = family_audit(fam)
            if rep.verdict != "valid_family":
                continue
            worst_budget = max(worst_budget, rep.budget_vs_B)
            worst_term = min(worst_term, min(rep.budget_terms))
            ok &= rep.budget_vs_B <= 3 + 1e-9 and min(rep.budget_terms) >= 1 - 1e-9
        return ok, {"families": len(families), "max_budget": worst_budget,
                    "min_term": worst_term}
    return _timed("7", "budget sum <= 3 with every term >= 1", run)


def random_subalgebra_pairs(seed: int = 0, n: int = 200):
    """Mix of complementary and non-complementary pairs, M2 and MASA kinds."""
    rng = np.random.default_rng(seed)
    catalog = list(enumerate_triples())
    masas = [("+XX", "+YZ", "+ZY"), ("+IZ", "+ZI", "+ZZ"), ("+XI", "+IX", "+XX")]
    pairs = []
    for idx in range(n):
        U = haar_random_unitary(4, rng)
        kind = idx % 5
        if kind == 0:
            s, t = (catalog[i] for i in rng.choice(len(catalog), 2, replace=False))
            pairs.append((conjugate(from_pauli_triple(*s), U), conjugate(from_pauli_triple(*t), U)))
        elif kind == 1:
            W = local_dressing(canonical_N(random_class_N_angles(rng)), rng)
            pairs.append((conjugate(A0(), U), conjugate(from_unitary(W), U)))
        elif kind == 2:
            pairs.append((from_unitary(U), from_unitary(haar_random_unitary(4, rng))))
        elif kind == 3:
            m = masa_from_pauli_triple(*masas[int(rng.integers(len(masas)))])
            t = catalog[int(rng.integers(len(catalog)))]
            pairs.append((conjugate(from_pauli_triple(*t), U), conjugate(m, U)))
        else:
            pairs.append((masa_from_unitary(U), from_unitary(haar_random_unitary(4, rng))))
    return pairs


def criterion_8(seed: int = 0):
    def run():
        pairs = random_subalgebra_pairs(seed)
        disagreements = 0
        complementary = 0
        for S, T in pairs:
            c = is_complementary(S, T, 1e-9)
            complementary += c
            disagreements += c != min_projection_check(S, T, 1e-9)
        return disagreements == 0, {"pairs": len(pairs), "complementary": int(complementary),
                                    "disagreements": int(disagreements)}
    return _timed("8", "minimal-projection rule <=> orthogonal traceless parts", run)


def run_all(seed: int = 0, progress=None) -> list[CriterionResult]:
    results = [criterion_1(seed), criterion_2(seed), criterion_3(seed), criterion_4(seed),
               criterion_5(), criterion_6a()]
    r6b = criterion_6b(seed, progress)
    k4 = r6b.details.pop("_k4_result", None)
    results.append(r6b)
    results.append(criterion_7(k4, seed))
    results.append(criterion_8(seed))
    return results

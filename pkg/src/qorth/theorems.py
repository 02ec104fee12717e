"""Quantitative statements about complementary M_2 subalgebras, made checkable.

Notation: A0 = C I (x) M_2, B = M_2 (x) C I, N(a) the canonical interaction
with angles a = (alpha, beta, gamma).

* ``cond_exp_N_formula`` -- the conditional expectation onto B of
  N (I (x) s_i) N^* is a single Pauli s_k (x) I times a product of two
  doubled-angle sines.
* ``overlap_formula`` -- Tr(P Q) between W A0 W^* (W = (L1 (x) L2) N(a)) and
  B equals sin^2 2b sin^2 2g + sin^2 2a sin^2 2g + sin^2 2a sin^2 2b.
* ``theorem_trois_check`` -- for useful W that overlap is at least 1.
* ``family_audit`` -- pairwise overlaps of a family plus the budget
  sum_{i >= 1} Tr(P_i Q) <= Tr Q = 3, which caps a family at 4 members.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .canonical import CanonicalAngles, angles, canonical_N, is_useful
from .core import DEFAULT_EPS, I2, I4, SIGMA, dagger, max_abs, require_unitary, tau
from .pauli import PauliString, expand
from .subalgebra import (
    M2, Subalgebra, B, conditional_expectation, conjugate, from_pauli_triple,
    from_unitary, overlap, overlap_via_projectors, traceless_projector,
)

log = logging.getLogger(__name__)

PAULI_FOUR_FAMILY = (
    ("+IX", "+IY", "+IZ"),
    ("+XI", "+YX", "+ZX"),
    ("+XY", "+YY", "+ZI"),
    ("+XZ", "+ZZ", "+YI"),
)

# Which two doubled angles enter the coefficient for generator i = 1, 2, 3.
_COEFFICIENT_ANGLES = {1: (1, 2), 2: (0, 2), 3: (0, 1)}
# Pauli direction s_k (x) I as usually quoted next to each closed form;
# the third entry disagrees with the numerics (see cond_exp_direction).
REFERENCE_DIRECTIONS = {1: 1, 2: 2, 3: 2}

_REFERENCE_ANGLES = CanonicalAngles(0.3, 0.55, 0.2)


def _generator_image(i: int, a) -> np.ndarray:
    N = canonical_N(a)
    return N @ np.kron(I2, SIGMA[i]) @ dagger(N)


def cond_exp_N_direct(i: int, a) -> np.ndarray:
    """E_B(N (I (x) s_i) N^*) by explicit projection onto B."""
    if i not in (1, 2, 3):
        raise ValueError("generator index must be 1, 2 or 3")
    return conditional_expectation(B(), _generator_image(i, a))


def cond_exp_coefficient(i: int, a) -> float:
    if i not in (1, 2, 3):
        raise ValueError("generator index must be 1, 2 or 3")
    v = angles(a).as_tuple()
    j, k = _COEFFICIENT_ANGLES[i]
    return math.sin(2 * v[j]) * math.sin(2 * v[k])


@functools.lru_cache(maxsize=None)
def cond_exp_direction(i: int) -> int:
    """Index k with E_B(N (I (x) s_i) N^*) proportional to s_k (x) I.

    Determined numerically at a generic angle triple where the coefficient
    is far from zero; the expansion must have exactly one surviving term.
    """
    E = expand(cond_exp_N_direct(i, _REFERENCE_ANGLES))
    mags = np.abs(E)
    k = int(np.argmax(mags[:, 0]))
    mags[k, 0] = 0.0
    if k == 0 or mags.max() > 1e-12:
        raise ArithmeticError(f"conditional expectation of generator {i} is not along one Pauli")
    return k


def direction_report() -> dict:
    """Numerically resolved directions against the quoted reference ones."""
    out = {}
    for i in (1, 2, 3):
        k = cond_exp_direction(i)
        out[i] = {"resolved": PauliString(k, 0).letters,
                  "reference": PauliString(REFERENCE_DIRECTIONS[i], 0).letters,
                  "agrees": k == REFERENCE_DIRECTIONS[i]}
    return out


def cond_exp_N_formula(i: int, a) -> tuple[float, PauliString]:
    """Closed form (coefficient, s_k (x) I) for E_B(N (I (x) s_i) N^*)."""
    return cond_exp_coefficient(i, a), PauliString(cond_exp_direction(i), 0)


def overlap_formula(a) -> float:
    al, be, ga = angles(a)
    sa, sb, sg = (math.sin(2 * x) ** 2 for x in (al, be, ga))
    return sb * sg + sa * sg + sa * sb


def pauli_overlap_sums(a) -> tuple[float, float]:
    """Full double sum and diagonal-only sum of tau(N(I s_i)N^* (s_j I))^2."""
    N = canonical_N(a)
    Nd = dagger(N)
    T = np.array([[tau(N @ np.kron(I2, SIGMA[i]) @ Nd @ np.kron(SIGMA[j], I2))
                   for j in (1, 2, 3)] for i in (1, 2, 3)])
    sq = np.abs(T) ** 2
    return float(sq.sum()), float(np.trace(sq))


def subalgebra_from_angles(a, L1=None, L2=None) -> Subalgebra:
    L1 = I2 if L1 is None else L1
    L2 = I2 if L2 is None else L2
    return from_unitary(np.kron(L1, L2) @ canonical_N(a))


@dataclass
class TroisResult:
    is_useful: bool
    overlap_with_B: float
    bound_holds: bool
    applicable: bool

    def to_json(self) -> dict:
        return {"is_useful": self.is_useful, "overlap_with_B": self.overlap_with_B,
                "bound_holds": self.bound_holds,
                "applicable": self.applicable}


def theorem_trois_check(W, tol: float = DEFAULT_EPS, useful_tol: float = 1e-8) -> TroisResult:
    """Overlap of W A0 W^* with B, and whether it is >= 1 when W is useful."""
    W = require_unitary(W, max(tol, 1e-8))
    useful = is_useful(W, useful_tol)
    ov = overlap(from_unitary(W), B())
    return TroisResult(useful, ov, (ov >= 1 - tol) if useful else True, useful)


# ------------------------------------------------------------ family audit

def a0_conjugator(S: Subalgebra) -> np.ndarray:
    """A unitary W with S = W A0 W^*.

    Uses the stored conjugator when present, otherwise builds one from the
    basis: the +1 eigenspace of b3 gives W|a,0>, and b1 maps it to W|a,1>.
    """
    if S.kind != M2:
        raise ValueError("only M2 subalgebras are unitary images of A0")
    if S.conjugator is not None:
        return S.conjugator
    b1, b2, _ = S.basis
    b3 = -1j * b1 @ b2
    vals, vecs = np.linalg.eigh(0.5 * (b3 + dagger(b3)))
    plus = vecs[:, vals > 0]
    if plus.shape[1] != 2:
        raise ValueError("basis does not have the spectrum of an M2 subalgebra")
    W = np.empty((4, 4), dtype=complex)
    for a in range(2):
        W[:, 2 * a] = plus[:, a]
        W[:, 2 * a + 1] = b1 @ plus[:, a]
    if max_abs(W @ np.kron(I2, SIGMA[2]) @ dagger(W) - b2) > 1e-8:
        raise ArithmeticError("failed to build a conjugating unitary")
    return W


def gauge_fix(family: list) -> tuple[list, bool]:
    """Conjugate the family so that its first member becomes A0.

    Returns the new family and whether any conjugation was applied.
    """
    W0 = a0_conjugator(family[0])
    if max_abs(W0 - I4) <= 1e-14:
        return list(family), False
    log.info("gauge fix: conjugating %d members by W0^*", len(family))
    U = dagger(W0)
    return [conjugate(S, U) for S in family], True


@dataclass
class FamilyReport:
    size: int
    pairwise_overlaps: list
    complementary_pairs: list
    budget_vs_B: float
    budget_terms: list
    projector_sum_norm: float
    budget_holds: bool
    terms_at_least_one: bool
    violations: list = field(default_factory=list)
    gauge_fixed: bool = False
    tolerance: float = DEFAULT_EPS

    @property
    def verdict(self) -> str:
        return "valid_family" if not self.violations else "violations"

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "verdict": self.verdict,
            "violations": list(self.violations),
            "pairwise_overlaps": self.pairwise_overlaps,
            "complementary_pairs": self.complementary_pairs,
            "budget_vs_B": self.budget_vs_B,
            "budget_terms": self.budget_terms,
            "projector_sum_norm": self.projector_sum_norm,
            "budget_holds": self.budget_holds,
            "terms_at_least_one": self.terms_at_least_one,
            "gauge_fixed": self.gauge_fixed,
            "tolerance": self.tolerance,
        }

    def to_latex(self, digits: int = 4) -> str:
        n = self.size
        head = " & ".join(["$\\mathcal{A}^{%d}$" % j for j in range(n)])
        lines = ["\\begin{tabular}{c|" + "c" * n + "}",
                 " & " + head + " \\\\", "\\hline"]
        for i, row in enumerate(self.pairwise_overlaps):
            cells = " & ".join(f"{v:.{digits}f}" for v in row)
            lines.append("$\\mathcal{A}^{%d}$ & %s \\\\" % (i, cells))
        lines.append("\\end{tabular}")
        return "\n".join(lines)


def family_audit(family: list, tol: float = DEFAULT_EPS, gauge: bool = True) -> FamilyReport:
    """Pairwise overlaps and the budget against B for a family of subalgebras.

    With ``gauge`` the family is first conjugated so that member 0 is A0.
    """
    if not family:
        raise ValueError("family must not be empty")
    if gauge and family[0].kind == M2:
        fam, fixed = gauge_fix(family)
    else:
        fam, fixed = list(family), False
    n = len(fam)
    ov = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            ov[i][j] = ov[j][i] = overlap(fam[i], fam[j])
    comp = [[i != j and ov[i][j] <= tol for j in range(n)] for i in range(n)]
    violations = [f"members {i} and {j} are not complementary (overlap {ov[i][j]:.6g})"
                  for i in range(n) for j in range(i + 1, n) if ov[i][j] > tol]

    b = B()
    terms = [overlap(S, b) for S in fam[1:]]
    budget = float(sum(terms))
    if n > 1:
        P = sum(traceless_projector(S).matrix for S in fam[1:])
        psum = float(np.linalg.eigvalsh(0.5 * (P + dagger(P))).max())
    else:
        psum = 0.0
    sub_identity = psum <= 1 + math.sqrt(tol)
    budget_holds = budget <= 3 + tol if sub_identity else True
    terms_ok = all(t >= 1 - tol for t, S in zip(terms, fam[1:]) if overlap(fam[0], S) <= tol)
    if sub_identity and not budget_holds:
        violations.append(f"budget against B exceeds 3 ({budget:.12g})")
    return FamilyReport(n, ov, comp, budget, terms, psum, budget_holds, terms_ok,
                        violations, fixed, tol)


def pauli_four_family() -> list[Subalgebra]:
    return [from_pauli_triple(*t) for t in PAULI_FOUR_FAMILY]


def projector_overlap_crosscheck(S: Subalgebra, T: Subalgebra) -> float:
    """|sum-of-squares overlap - Tr(P_S P_T)|."""
    return abs(overlap(S, T) - overlap_via_projectors(S, T))

"""Subalgebras of M_4 of type M_2 (or maximal Abelian), and their geometry.

A subalgebra is stored through a tau-orthonormal basis of its traceless
part. Complementarity of two subalgebras means their traceless parts are
orthogonal, which is what :func:`overlap` measures.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    DEFAULT_EPS, I2, I4, SIGMA, SWAP, as_cmat, dagger, hs_inner, is_hermitian,
    matrix_from_json, matrix_to_json, max_abs, require_unitary, tau,
)
from .pauli import PauliString, anticommutes, pauli_matrix, pauli_product

M2 = "M2"
MASA = "MASA"

_A0_GENERATORS = tuple(np.kron(I2, s) for s in SIGMA[1:])
_DIAG_GENERATORS = (np.kron(I2, SIGMA[3]), np.kron(SIGMA[3], I2), np.kron(SIGMA[3], SIGMA[3]))


@dataclass(frozen=True, eq=False)
class Subalgebra:
    kind: str
    basis: tuple
    conjugator: Optional[np.ndarray] = field(default=None)
    label: str = ""

    def __post_init__(self):
        if self.kind not in (M2, MASA):
            raise ValueError(f"kind must be 'M2' or 'MASA', got {self.kind!r}")
        basis = tuple(as_cmat(b) for b in self.basis)
        if len(basis) != 3 or any(b.shape != (4, 4) for b in basis):
            raise ValueError("a subalgebra basis must be three 4x4 matrices")
        object.__setattr__(self, "basis", basis)

    def basis_array(self) -> np.ndarray:
        return np.stack(self.basis)

    def __repr__(self):
        name = f" {self.label}" if self.label else ""
        return f"<Subalgebra {self.kind}{name}>"


class TracelessProjector:
    """Orthogonal projection on M_4 (16-dim, tau inner product) onto a traceless part.

    ``matrix`` acts on coordinates ``vec(A) / 2``, in which the standard
    inner product coincides with tau(A^* B).
    """

    def __init__(self, basis):
        V = np.stack([np.asarray(b).ravel() / 2 for b in basis], axis=1)
        self.matrix = V @ dagger(V)

    def apply(self, A) -> np.ndarray:
        A = as_cmat(A)
        return (self.matrix @ (A.ravel() / 2)).reshape(4, 4) * 2

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def gram_schmidt(mats) -> list[np.ndarray]:
    """Orthonormalize 4x4 matrices with respect to tau."""
    out: list[np.ndarray] = []
    for M in mats:
        v = as_cmat(M).copy()
        for u in out:
            v = v - hs_inner(u, v) * u
        norm = np.sqrt(abs(hs_inner(v, v)))
        if norm < 1e-12:
            raise ValueError("basis elements are linearly dependent")
        out.append(v / norm)
    return out


def _conjugate_all(W, mats):
    Wd = dagger(W)
    return [W @ m @ Wd for m in mats]


def from_unitary(W, tol: float = DEFAULT_EPS, label: str = "") -> Subalgebra:
    """The M_2 subalgebra W (C I (x) M_2) W^*."""
    W = require_unitary(W, max(tol, 1e-8))
    basis = gram_schmidt(_conjugate_all(W, _A0_GENERATORS))
    return Subalgebra(M2, tuple(basis), W, label)


def masa_from_unitary(W, tol: float = DEFAULT_EPS, label: str = "") -> Subalgebra:
    """The maximal Abelian subalgebra W D W^* with D the diagonal matrices."""
    W = require_unitary(W, max(tol, 1e-8))
    basis = gram_schmidt(_conjugate_all(W, _DIAG_GENERATORS))
    return Subalgebra(MASA, tuple(basis), W, label)


def A0() -> Subalgebra:
    return from_unitary(I4, label="A0")


def B() -> Subalgebra:
    return from_unitary(SWAP, label="B")


def _check_triple(triple, want_anticommuting: bool):
    p = [t if isinstance(t, PauliString) else PauliString.parse(t) for t in triple]
    if len(p) != 3:
        raise ValueError("a Pauli triple needs exactly three strings")
    if any(q.is_identity for q in p):
        raise ValueError("Pauli triple contains the identity")
    if not all(q.is_hermitian for q in p):
        raise ValueError("Pauli triple members must carry a real phase (+ or -)")
    if len({q.unsigned() for q in p}) != 3:
        raise ValueError("Pauli triple has repeated strings")
    pairs = [(p[0], p[1]), (p[0], p[2]), (p[1], p[2])]
    if want_anticommuting:
        if not all(anticommutes(a, b) for a, b in pairs):
            raise ValueError("Pauli triple is not pairwise anticommuting")
    elif any(anticommutes(a, b) for a, b in pairs):
        raise ValueError("Pauli triple is not pairwise commuting")
    if pauli_product(p[0], p[1]).unsigned() != p[2].unsigned():
        raise ValueError("Pauli triple is not closed under multiplication")
    return p


def from_pauli_triple(p1, p2, p3, label: str = "") -> Subalgebra:
    """M_2 subalgebra spanned by I and three anticommuting Pauli strings."""
    p = _check_triple((p1, p2, p3), want_anticommuting=True)
    return Subalgebra(M2, tuple(pauli_matrix(q) for q in p), None,
                      label or ",".join(str(q) for q in p))


def masa_from_pauli_triple(p1, p2, p3, label: str = "") -> Subalgebra:
    """Maximal Abelian subalgebra spanned by I and three commuting Pauli strings."""
    p = _check_triple((p1, p2, p3), want_anticommuting=False)
    return Subalgebra(MASA, tuple(pauli_matrix(q) for q in p), None,
                      label or ",".join(str(q) for q in p))


def conjugate(S: Subalgebra, U) -> Subalgebra:
    """U S U^*."""
    U = require_unitary(U, 1e-8, "U")
    conj = None if S.conjugator is None else U @ S.conjugator
    return Subalgebra(S.kind, tuple(_conjugate_all(U, S.basis)), conj, S.label)


def validate(S: Subalgebra, tol: float = 1e-8) -> None:
    """Raise ``ValueError`` unless ``S`` satisfies the subalgebra invariants."""
    b = S.basis
    for i, x in enumerate(b):
        if abs(tau(x)) > tol:
            raise ValueError(f"basis[{i}] is not traceless")
        if not is_hermitian(x, tol):
            raise ValueError(f"basis[{i}] is not self-adjoint")
        for j, y in enumerate(b):
            if abs(hs_inner(x, y) - (i == j)) > tol:
                raise ValueError("basis is not tau-orthonormal")
    span = [I4, *b]
    for x in b:
        for y in b:
            xy = x @ y
            resid = xy - sum(hs_inner(u, xy) * u for u in span)
            if max_abs(resid) > tol:
                raise ValueError("span of the basis is not closed under multiplication")
    for i in range(3):
        for j in range(i + 1, 3):
            if S.kind == M2 and max_abs(b[i] @ b[j] + b[j] @ b[i]) > tol:
                raise ValueError("M2 basis elements must pairwise anticommute")
            if S.kind == MASA and max_abs(b[i] @ b[j] - b[j] @ b[i]) > tol:
                raise ValueError("MASA basis elements must pairwise commute")
    if S.conjugator is not None:
        W = S.conjugator
        gens = _DIAG_GENERATORS if S.kind == MASA else _A0_GENERATORS
        images = _conjugate_all(W, gens)
        G = np.array([[hs_inner(x, y) for y in images] for x in b])
        # images must lie in span(b): the Gram rows then carry unit norm
        if np.max(np.abs(np.sum(np.abs(G) ** 2, axis=0) - 1)) > tol:
            raise ValueError("conjugator does not generate the stored basis")


def traceless_projector(S: Subalgebra) -> TracelessProjector:
    return TracelessProjector(S.basis)


def cross_gram(S: Subalgebra, T: Subalgebra) -> np.ndarray:
    """G[i, j] = <b_i(S), b_j(T)>."""
    Bs = S.basis_array().reshape(3, 16)
    Bt = T.basis_array().reshape(3, 16)
    return Bs.conj() @ Bt.T / 4


def overlap(S: Subalgebra, T: Subalgebra) -> float:
    """Tr(P_S P_T) as the sum of squared cross inner products."""
    return float(np.sum(np.abs(cross_gram(S, T)) ** 2))


def overlap_via_projectors(S: Subalgebra, T: Subalgebra) -> float:
    P = traceless_projector(S).matrix
    Q = traceless_projector(T).matrix
    return float(np.trace(P @ Q).real)


def is_complementary(S: Subalgebra, T: Subalgebra, tol: float = DEFAULT_EPS) -> bool:
    return overlap(S, T) <= tol


def minimal_projections(S: Subalgebra, seed: int = 0) -> list[np.ndarray]:
    """A family of minimal projections of ``S`` rich enough to test complementarity.

    For M2 these are the spectral projections (I +- b)/2 of each basis
    element; for a MASA the four rank-one joint spectral projections.
    """
    if S.kind == M2:
        out = []
        for b in S.basis:
            if max_abs(b @ b - I4) > 1e-8:
                raise ValueError("M2 basis element is not a self-adjoint unitary; "
                                 "minimal projections unavailable")
            out.extend([(I4 + b) / 2, (I4 - b) / 2])
        return out
    rng = np.random.default_rng(seed)
    H = sum(c * b for c, b in zip(rng.uniform(0.5, 1.5, 3), S.basis))
    _, V = np.linalg.eigh(0.5 * (H + dagger(H)))
    return [np.outer(V[:, k], V[:, k].conj()) for k in range(4)]


def min_projection_defect(S: Subalgebra, T: Subalgebra) -> float:
    """max |tau(PQ) - tau(P) tau(Q)| over sampled minimal projections."""
    worst = 0.0
    for P in minimal_projections(S):
        tp = tau(P)
        for Q in minimal_projections(T):
            worst = max(worst, abs(tau(P @ Q) - tp * tau(Q)))
    return worst


def min_projection_check(S: Subalgebra, T: Subalgebra, tol: float = DEFAULT_EPS) -> bool:
    """Complementarity through the product rule for minimal projections.

    Uses the normalized trace: tau(PQ) = tau(P) tau(Q).
    """
    return min_projection_defect(S, T) <= tol


def conditional_expectation(S: Subalgebra, A) -> np.ndarray:
    """Trace-preserving orthogonal projection of ``A`` onto ``S``."""
    A = as_cmat(A)
    if A.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {A.shape}")
    out = tau(A) * I4
    for b in S.basis:
        out = out + hs_inner(b, A) * b
    return out


def reduce_state(S: Subalgebra, rho, tol: float = 1e-9) -> np.ndarray:
    """Reduction of the density matrix ``rho`` to ``S``."""
    rho = as_cmat(rho)
    if rho.shape != (4, 4):
        raise ValueError("rho must be 4x4")
    if not is_hermitian(rho, tol):
        raise ValueError("rho is not self-adjoint")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("rho does not have unit trace")
    if np.linalg.eigvalsh(0.5 * (rho + dagger(rho))).min() < -tol:
        raise ValueError("rho is not positive semidefinite")
    return conditional_expectation(S, rho)


def to_json(S: Subalgebra) -> dict:
    return {
        "kind": S.kind,
        "basis": [matrix_to_json(b) for b in S.basis],
        "conjugator": None if S.conjugator is None else matrix_to_json(S.conjugator),
    }


def parse_triple_text(text: str) -> list[str]:
    body = text[len("triple:"):] if text.startswith("triple:") else text
    parts = [t.strip() for t in body.split(",") if t.strip()]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated Pauli strings, got {text!r}")
    return parts


def from_json(obj) -> Subalgebra:
    """Parse subalgebra JSON, including the ``{"triple": [...]}`` shorthand."""
    if isinstance(obj, str):
        return from_pauli_triple(*parse_triple_text(obj))
    if not isinstance(obj, dict):
        raise ValueError("subalgebra JSON must be an object")
    if "triple" in obj:
        triple = obj["triple"]
        if isinstance(triple, str):
            triple = parse_triple_text(triple)
        if obj.get("kind", M2) == MASA:
            return masa_from_pauli_triple(*triple)
        return from_pauli_triple(*triple)
    if "unitary" in obj:
        W = matrix_from_json(obj["unitary"])
        return (masa_from_unitary if obj.get("kind") == MASA else from_unitary)(W)
    for key in ("kind", "basis"):
        if key not in obj:
            raise ValueError(f"subalgebra JSON missing field '{key}'")
    if not isinstance(obj["basis"], list) or len(obj["basis"]) != 3:
        raise ValueError("subalgebra JSON field 'basis' must hold three matrices")
    basis = [matrix_from_json(m) for m in obj["basis"]]
    conj = obj.get("conjugator")
    S = Subalgebra(obj["kind"], tuple(basis),
                   None if conj is None else matrix_from_json(conj))
    validate(S)
    return S

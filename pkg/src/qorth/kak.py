"""Numerical Cartan (KAK) decomposition of two-qubit unitaries.

Every 4x4 unitary factors as

    W = g (L1 (x) L2) N(alpha, beta, gamma) (L3 (x) L4)

with special-unitary locals and a unit phase g. The angles are reduced to
the Weyl chamber pi/4 >= alpha >= beta >= |gamma|, with gamma >= 0 whenever
alpha = pi/4.

Method: in the magic basis local unitaries become real orthogonal and the
interaction becomes diagonal, so M = Q^* W Q (with det M = 1) factors as
O1 D O2. The symmetric unitary M^T M = O2^T D^2 O2 yields O2 and D; O1 is
then M O2^T D^-1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .canonical import CanonicalAngles, angles, canonical_N
from .core import (
    DEFAULT_EPS, I2, SIGMA, DecompositionError, dagger, diag_sym_unitary, max_abs,
    require_unitary,
)

RECONSTRUCTION_TOL = 1e-8

MAGIC = np.array([[1, 0, 0, 1j],
                  [0, 1j, 1, 0],
                  [0, 1j, -1, 0],
                  [1, 0, 0, -1j]], dtype=complex) / math.sqrt(2)
MAGIC_DAG = dagger(MAGIC)

# Row j: eigenvalue signs of (I, XX, YY, ZZ) on magic-basis vector j.
_SIGNS = np.array([
    [1.0] + [float(np.real(MAGIC_DAG @ np.kron(s, s) @ MAGIC)[j, j]) for s in SIGMA[1:]]
    for j in range(4)
])
_SIGNS_INV = np.linalg.inv(_SIGNS)

_AXIS_NAMES = ("alpha", "beta", "gamma")
_SWAPPERS = {
    frozenset((0, 1)): (SIGMA[1] + SIGMA[2]) / math.sqrt(2),
    frozenset((0, 2)): (SIGMA[1] + SIGMA[3]) / math.sqrt(2),
    frozenset((1, 2)): (SIGMA[2] + SIGMA[3]) / math.sqrt(2),
}


@dataclass(frozen=True, eq=False)
class KakDecomposition:
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    L4: np.ndarray
    angles: CanonicalAngles
    global_phase: complex = 1.0
    reconstruction_error: float = field(default=0.0)

    def unitary(self) -> np.ndarray:
        return kak_reconstruct(self)


@dataclass
class LocalCorrection:
    """N(original) = phase (A1 (x) A2) N(canonical) (B1 (x) B2)."""
    phase: complex = 1.0
    A1: np.ndarray = field(default_factory=lambda: I2.copy())
    A2: np.ndarray = field(default_factory=lambda: I2.copy())
    B1: np.ndarray = field(default_factory=lambda: I2.copy())
    B2: np.ndarray = field(default_factory=lambda: I2.copy())
    steps: list = field(default_factory=list)


def kak_reconstruct(K: KakDecomposition) -> np.ndarray:
    left = np.kron(K.L1, K.L2)
    right = np.kron(K.L3, K.L4)
    return K.global_phase * (left @ canonical_N(K.angles) @ right)


def canonicalize(a, atol: float = 1e-9) -> tuple[CanonicalAngles, LocalCorrection]:
    """Reduce an angle triple to the Weyl chamber.

    Uses shifts by pi/2, pairwise negations and transpositions, each of which
    is implemented by Pauli-type local unitaries recorded in the returned
    :class:`LocalCorrection`.
    """
    v = list(angles(a))
    cor = LocalCorrection()

    def shift(k, step):
        v[k] += step * math.pi / 2
        P = SIGMA[k + 1]
        cor.phase *= -1j * step
        cor.B1 = P @ cor.B1
        cor.B2 = P @ cor.B2
        cor.steps.append(f"shift({_AXIS_NAMES[k]},{step:+d})")

    def negate(k1, k2):
        v[k1], v[k2] = -v[k1], -v[k2]
        P = SIGMA[3 - k1 - k2 + 1]
        cor.A1 = cor.A1 @ P
        cor.B1 = P @ cor.B1
        cor.steps.append(f"negate({_AXIS_NAMES[k1]},{_AXIS_NAMES[k2]})")

    def swap(k1, k2):
        v[k1], v[k2] = v[k2], v[k1]
        S = _SWAPPERS[frozenset((k1, k2))]
        cor.A1, cor.A2 = cor.A1 @ S, cor.A2 @ S
        cor.B1, cor.B2 = S @ cor.B1, S @ cor.B2
        cor.steps.append(f"swap({_AXIS_NAMES[k1]},{_AXIS_NAMES[k2]})")

    def into_range(k):
        # target interval (-pi/4, pi/4]
        n = math.floor((v[k] + math.pi / 4) / (math.pi / 2))
        if v[k] + math.pi / 4 - n * math.pi / 2 == 0.0:
            n -= 1
        for _ in range(abs(n)):
            shift(k, -1 if n > 0 else 1)

    for k in range(3):
        into_range(k)
    if abs(v[0]) < abs(v[1]):
        swap(0, 1)
    if abs(v[1]) < abs(v[2]):
        swap(1, 2)
    if abs(v[0]) < abs(v[1]):
        swap(0, 1)
    if v[0] < 0:
        negate(0, 2)
    if v[1] < 0:
        negate(1, 2)
    into_range(2)
    if v[0] > math.pi / 4 - atol and v[2] < 0:
        shift(0, -1)
        negate(0, 2)
    return CanonicalAngles(*v), cor


def kron_factor(K, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Split K = a (x) b with ``b`` special unitary."""
    grid = np.asarray(K).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
    norms = np.sum(np.abs(grid) ** 2, axis=(2, 3))
    i, j = np.unravel_index(np.argmax(norms), norms.shape)
    b = grid[i, j]
    b = b / cmath.sqrt(np.linalg.det(b))
    a = np.einsum("kl,ijkl->ij", b.conj(), grid) / 2
    if max_abs(np.kron(a, b) - K) > tol:
        raise DecompositionError("matrix is not a tensor product")
    return a, b


def _realignment_singular_values(W) -> np.ndarray:
    R = np.asarray(W).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    return np.linalg.svd(R, compute_uv=False)


def is_local(W, tol: float = 1e-10) -> bool:
    """Whether W is a tensor product of two 2x2 matrices (rank-one realignment)."""
    s = _realignment_singular_values(W)
    return s[1] <= tol * max(s[0], 1.0)


def _special(L) -> tuple[np.ndarray, complex]:
    r = cmath.sqrt(np.linalg.det(L))
    return L / r, r


def _finish(W, phase, L1, L2, a, L3, L4) -> KakDecomposition:
    parts = []
    for L in (L1, L2, L3, L4):
        S, r = _special(L)
        parts.append(S)
        phase *= r
    K = KakDecomposition(*parts, angles=a, global_phase=complex(phase))
    err = max_abs(kak_reconstruct(K) - W)
    return KakDecomposition(*parts, angles=a, global_phase=complex(phase),
                            reconstruction_error=err)


def _decompose_once(W, seed: int) -> KakDecomposition:
    det = np.linalg.det(W)
    g0 = det ** 0.25
    M = MAGIC_DAG @ (W / g0) @ MAGIC
    MtM = M.T @ M
    MtM = 0.5 * (MtM + MtM.T)
    O, d = diag_sym_unitary(MtM, tol=1e-9, seed=seed)
    if np.linalg.det(O) < 0:
        O[:, 0] = -O[:, 0]
    D = np.sqrt(d)
    O1 = (M @ O / D).real
    if np.linalg.det(O1) < 0:
        O1[:, 0] = -O1[:, 0]
        D[0] = -D[0]
    theta = np.angle(D)
    w, al, be, ga = _SIGNS_INV @ theta
    K1 = MAGIC @ O1 @ MAGIC_DAG
    K2 = MAGIC @ O.T @ MAGIC_DAG
    a1, b1 = kron_factor(K1, tol=1e-6)
    a2, b2 = kron_factor(K2, tol=1e-6)
    canon, cor = canonicalize((al, be, ga))
    phase = g0 * cmath.exp(1j * w) * cor.phase
    return _finish(W, phase, a1 @ cor.A1, b1 @ cor.A2, canon, cor.B1 @ a2, cor.B2 @ b2)


def kak_decompose(W, tol: float = DEFAULT_EPS, seed: int = 0,
                  max_tries: int = 4) -> KakDecomposition:
    """Cartan decomposition of a 4x4 unitary with chamber-canonical angles.

    Raises ``ValueError`` for non-unitary input and
    :class:`~qorth.core.DecompositionError` if no attempt reaches a
    reconstruction error of 1e-8.
    """
    W = require_unitary(W, max(tol, 1e-8))
    if W.shape != (4, 4):
        raise ValueError(f"kak_decompose needs a 4x4 unitary, got {W.shape}")
    if is_local(W):
        a, b = kron_factor(W, tol=1e-8)
        S, r = _special(a)
        return _finish(W, r, S, b, CanonicalAngles(0.0, 0.0, 0.0), I2, I2)
    best = None
    for attempt in range(max_tries):
        try:
            K = _decompose_once(W, seed + attempt)
        except DecompositionError:
            continue
        if best is None or K.reconstruction_error < best.reconstruction_error:
            best = K
        if K.reconstruction_error <= RECONSTRUCTION_TOL:
            return K
    msg = "no attempt succeeded" if best is None else \
        f"best reconstruction error {best.reconstruction_error:.3g}"
    raise DecompositionError(f"KAK decomposition failed after {max_tries} tries ({msg})")


def identity_decomposition() -> KakDecomposition:
    return KakDecomposition(I2, I2, I2, I2, CanonicalAngles(0.0, 0.0, 0.0), 1.0)


def local_dressing(W, rng) -> np.ndarray:
    """(L1 (x) L2) W (L3 (x) L4) with Haar-random 2x2 locals."""
    from .core import haar_random_unitary
    L = [haar_random_unitary(2, rng) for _ in range(4)]
    return np.kron(L[0], L[1]) @ W @ np.kron(L[2], L[3])

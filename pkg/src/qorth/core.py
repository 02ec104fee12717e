"""Small dense complex matrices and the normalized Hilbert-Schmidt geometry.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The inner
product used everywhere is

    <A, B> = tau(A^* B) = Tr(A^* B) / n

which makes the two-qubit Pauli tensors an orthonormal basis of M_4.
"""
from __future__ import annotations

import json

import numpy as np

DEFAULT_EPS = 1e-9

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)
CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)


class DecompositionError(ArithmeticError):
    """Raised when a numerical factorization misses its reconstruction target."""


def as_cmat(A) -> np.ndarray:
    """Return ``A`` as a 2-d complex128 array, rejecting anything else."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {M.shape}")
    return M


def _square(A, name="matrix") -> np.ndarray:
    M = as_cmat(A)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def hs_inner(A, B) -> complex:
    """Normalized Hilbert-Schmidt inner product tau(A^* B).

    Conjugate-linear in ``A``.
    """
    A = _square(A, "A")
    B = _square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B) / A.shape[0])


def tr_inner(A, B) -> complex:
    """Unnormalized trace inner product Tr(A^* B)."""
    A = as_cmat(A)
    B = as_cmat(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def tau(A) -> complex:
    """Normalized trace Tr(A) / n."""
    A = _square(A)
    return complex(np.trace(A) / A.shape[0])


def kron(A, B) -> np.ndarray:
    """Kronecker product, (A (x) B)[(i,k),(j,l)] = A[i,j] B[k,l]."""
    return np.kron(as_cmat(A), as_cmat(B))


def dagger(A) -> np.ndarray:
    return np.conj(np.transpose(A))


def max_abs(A) -> float:
    """Max-entry norm."""
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def is_unitary(A, tol: float = DEFAULT_EPS) -> bool:
    A = _square(A)
    return max_abs(dagger(A) @ A - np.eye(A.shape[0])) <= tol


def is_hermitian(A, tol: float = DEFAULT_EPS) -> bool:
    A = _square(A)
    return max_abs(A - dagger(A)) <= tol


def require_unitary(W, tol: float = DEFAULT_EPS, name: str = "W") -> np.ndarray:
    W = _square(W, name)
    if not is_unitary(W, tol):
        err = max_abs(dagger(W) @ W - np.eye(W.shape[0]))
        raise ValueError(f"{name} is not unitary (|W*W - I|_max = {err:.3g})")
    return W


def haar_random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-distributed n x n unitary.

    QR of a complex Ginibre matrix with the diagonal of R rotated to be
    positive real. ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_orthogonal(n: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diagonal(R))


def diag_sym_unitary(M, tol: float = DEFAULT_EPS, seed: int = 0, max_tries: int = 8):
    """Diagonalize a symmetric unitary by a real orthogonal matrix.

    Returns ``(O, d)`` with ``M = O @ diag(d) @ O.T``, ``O`` real orthogonal
    and ``|d| = 1``. The real and imaginary parts of a symmetric unitary are
    commuting real symmetric matrices, so a generic real combination of
    them has an eigenbasis diagonalizing both.
    """
    M = _square(M, "M")
    if max_abs(M - M.T) > tol or not is_unitary(M, tol):
        raise ValueError("input is not a symmetric unitary")
    n = M.shape[0]
    # Symmetrize away the roundoff so eigh sees exactly symmetric inputs.
    re = 0.5 * (M.real + M.real.T)
    im = 0.5 * (M.imag + M.imag.T)
    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(max_tries):
        t = 1.0 if attempt == 0 else rng.uniform(0.1, 10.0)
        if attempt % 2:
            t = -t
        _, O = np.linalg.eigh(re + t * im)
        d = np.einsum("ij,ik,kj->j", O, M, O)
        d = d / np.abs(d)
        err = max_abs(O @ np.diag(d) @ O.T - M)
        if best is None or err < best[2]:
            best = (O, d, err)
        if err <= tol:
            return O, d
    raise DecompositionError(
        f"symmetric-unitary diagonalization failed after {max_tries} tries "
        f"(best error {best[2]:.3g}, n={n})")


def matrix_to_json(A) -> dict:
    A = as_cmat(A)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"rows", "cols", "data": [[re, im], ...]}`` (row-major)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("matrix JSON must be an object")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise ValueError(f"matrix JSON missing field '{key}'")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not isinstance(rows, int) or rows < 1:
        raise ValueError("matrix JSON field 'rows' must be a positive integer")
    if not isinstance(cols, int) or cols < 1:
        raise ValueError("matrix JSON field 'cols' must be a positive integer")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ValueError(f"matrix JSON field 'data' must hold rows*cols = {rows * cols} entries")
    out = np.empty(rows * cols, dtype=complex)
    for idx, entry in enumerate(data):
        if (not isinstance(entry, (list, tuple)) or len(entry) != 2
                or not all(isinstance(x, (int, float)) for x in entry)):
            raise ValueError(f"matrix JSON field 'data[{idx}]' must be a [re, im] pair")
        out[idx] = complex(entry[0], entry[1])
    return out.reshape(rows, cols)

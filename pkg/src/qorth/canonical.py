"""Useful unitaries and the canonical two-qubit interaction N(alpha, beta, gamma).

A unitary W on M_n (x) M_n is *useful* when W (C I (x) M_n) W^* is
complementary to C I (x) M_n. This is decided by looking at the n x n blocks
of W: they must form an orthonormal basis of M_n for the unnormalized trace
inner product Tr(A^* B).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_EPS, I4, SIGMA, as_cmat, require_unitary

CLASS_N_TOL = 1e-8

_XX, _YY, _ZZ = (np.kron(s, s) for s in SIGMA[1:])


@dataclass(frozen=True)
class CanonicalAngles:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    def __iter__(self):
        return iter((self.alpha, self.beta, self.gamma))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


def angles(a) -> CanonicalAngles:
    if isinstance(a, CanonicalAngles):
        return a
    return CanonicalAngles(*a)


def parse_angle(text: str) -> float:
    """Parse ``"0.3"``, ``"0.25pi"``, ``"-pi/4"``, ``"3/4pi"`` into radians."""
    t = str(text).strip().replace("π", "pi").replace(" ", "")
    sign = -1.0 if t.startswith("-") else 1.0
    t = t.lstrip("+-")
    scale = 1.0
    try:
        if t.startswith("pi/"):
            return sign * math.pi / float(t[3:])
        if t.endswith("pi"):
            scale = math.pi
            t = t[:-2].rstrip("*")
        if t == "":
            value = 1.0 if scale != 1.0 else float("nan")
        elif "/" in t:
            num, den = t.split("/")
            value = float(num) / float(den)
        else:
            value = float(t)
    except ValueError:
        raise ValueError(f"bad angle {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"bad angle {text!r}")
    return sign * value * scale


def blocks(W, n: int) -> np.ndarray:
    """The n x n grid of n x n blocks W_ij with W = sum E_ij (x) W_ij.

    Returned as an array of shape (n, n, n, n) indexed [i, j, :, :].
    """
    W = as_cmat(W)
    if n < 1 or W.shape != (n * n, n * n):
        raise ValueError(f"expected an {n * n}x{n * n} matrix for n={n}, got {W.shape}")
    return W.reshape(n, n, n, n).transpose(0, 2, 1, 3).copy()


def from_blocks(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=complex)
    n = grid.shape[0]
    return grid.transpose(0, 2, 1, 3).reshape(n * n, n * n)


def block_gram(W, n: int) -> np.ndarray:
    """Gram matrix Tr(W_ij^* W_kl) of the blocks, shape (n*n, n*n)."""
    V = blocks(W, n).reshape(n * n, n * n)
    return V.conj() @ V.T


def is_useful(W, tol: float = DEFAULT_EPS, n: int | None = None) -> bool:
    W = require_unitary(W, max(tol, 1e-8))
    if n is None:
        n = math.isqrt(W.shape[0])
        if n * n != W.shape[0]:
            raise ValueError(f"dimension {W.shape[0]} is not a perfect square")
    G = block_gram(W, n)
    return float(np.max(np.abs(G - np.eye(n * n)))) <= tol


def c_coefficients(a) -> tuple[complex, complex, complex, complex]:
    """Pauli coefficients c_0..c_3 of N(alpha, beta, gamma) = sum c_i s_i (x) s_i."""
    al, be, ga = angles(a)
    ca, cb, cg = math.cos(al), math.cos(be), math.cos(ga)
    sa, sb, sg = math.sin(al), math.sin(be), math.sin(ga)
    return (
        complex(ca * cb * cg, sa * sb * sg),
        complex(ca * sb * sg, sa * cb * cg),
        complex(sa * cb * sg, ca * sb * cg),
        complex(sa * sb * cg, ca * cb * sg),
    )


def _interaction(theta: float, P: np.ndarray) -> np.ndarray:
    # exp(i theta P) for P an involution
    return math.cos(theta) * I4 + 1j * math.sin(theta) * P


def canonical_N_from_coefficients(a) -> np.ndarray:
    c = c_coefficients(a)
    return sum(ci * np.kron(s, s) for ci, s in zip(c, SIGMA))


def canonical_N_from_exponentials(a) -> np.ndarray:
    al, be, ga = angles(a)
    return _interaction(al, _XX) @ _interaction(be, _YY) @ _interaction(ga, _ZZ)


def canonical_N(a, check: bool = True) -> np.ndarray:
    """exp(i alpha XX) exp(i beta YY) exp(i gamma ZZ).

    With ``check`` the coefficient form and the exponential form are built
    independently and required to agree within 1e-12.
    """
    N = canonical_N_from_coefficients(a)
    if check:
        M = canonical_N_from_exponentials(a)
        err = float(np.max(np.abs(N - M)))
        if err > 1e-12:
            raise ArithmeticError(f"canonical N constructions disagree by {err:.3g}")
    return N


def canonical_N_closed_form(a) -> np.ndarray:
    """N written entrywise with e^{+-i gamma} and cos/sin of alpha -+ beta."""
    al, be, ga = angles(a)
    p, m = np.exp(1j * ga), np.exp(-1j * ga)
    cd, sd = math.cos(al - be), math.sin(al - be)
    cs, ss = math.cos(al + be), math.sin(al + be)
    return np.array([
        [p * cd, 0, 0, 1j * p * sd],
        [0, m * cs, 1j * m * ss, 0],
        [0, 1j * m * ss, m * cs, 0],
        [1j * p * sd, 0, 0, p * cd],
    ], dtype=complex)


def cos2_values(a) -> tuple[float, float, float]:
    return tuple(math.cos(x) ** 2 for x in angles(a))


def in_class_N(a, tol: float = CLASS_N_TOL) -> bool:
    """At least two of cos^2(alpha), cos^2(beta), cos^2(gamma) equal 1/2."""
    return sum(abs(c - 0.5) <= tol for c in cos2_values(a)) >= 2


def block_constraints(a) -> tuple[float, float, float, float]:
    """Residuals of the block orthonormality equations for N(a).

    The first two are the real-part orthogonality equations, the last two
    the unit-norm equations; all vanish exactly when N(a) is useful.
    """
    c0, c1, c2, c3 = c_coefficients(a)
    p, q = c0 + c3, c0 - c3
    r, s = c1 + c2, c1 - c2
    return (
        abs(np.conj(p) * q + np.conj(q) * p),
        abs(np.conj(s) * r + np.conj(r) * s),
        abs(abs(p) ** 2 + abs(q) ** 2 - 1),
        abs(abs(r) ** 2 + abs(s) ** 2 - 1),
    )


def random_class_N_angles(rng) -> CanonicalAngles:
    """Random class-N triple: two angles at pi/4 + k pi/2, one free, random order."""
    fixed = [math.pi / 4 + rng.integers(-2, 3) * math.pi / 2 for _ in range(2)]
    free = rng.uniform(-math.pi, math.pi)
    vals = fixed + [free]
    rng.shuffle(vals)
    return CanonicalAngles(*vals)

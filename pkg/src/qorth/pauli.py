"""Exact two-qubit Pauli algebra.

A :class:`PauliString` is ``i**k * sigma_a (x) sigma_b``. Phases are kept as the
exponent ``k`` modulo 4, so products and commutation checks never touch
floating point.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from .core import SIGMA, as_cmat, hs_inner

LETTERS = "IXYZ"
_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TEXT_RE = re.compile(r"^\s*([+-]?)(i?)([IXYZ]{2})\s*$")


def _single_product(a: int, b: int) -> tuple[int, int]:
    """sigma_a sigma_b = i**k sigma_c; returns (c, k)."""
    if a == 0:
        return b, 0
    if b == 0 or a == b:
        return (a, 0) if b == 0 else (0, 0)
    c = 6 - a - b
    # cyclic (1,2,3) gives +i, anticyclic gives -i
    return c, (1 if (b - a) % 3 == 1 else 3)


@dataclass(frozen=True, order=True)
class PauliString:
    first: int
    second: int
    phase: int = 0  # exponent k of i**k

    def __post_init__(self):
        if self.first not in range(4) or self.second not in range(4):
            raise ValueError(f"Pauli indices must be in 0..3, got ({self.first}, {self.second})")
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``"+XZ"``, ``"-iYI"``, ``"XX"``."""
        m = _TEXT_RE.match(text)
        if m is None:
            raise ValueError(f"bad Pauli string {text!r}")
        sign, imag, letters = m.groups()
        k = (2 if sign == "-" else 0) + (1 if imag else 0)
        return cls(LETTERS.index(letters[0]), LETTERS.index(letters[1]), k)

    @property
    def coefficient(self) -> complex:
        return 1j ** self.phase

    @property
    def letters(self) -> str:
        return LETTERS[self.first] + LETTERS[self.second]

    @property
    def is_identity(self) -> bool:
        return self.first == 0 and self.second == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def unsigned(self) -> "PauliString":
        return PauliString(self.first, self.second, 0)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_product(self, other)

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.letters


def pauli_matrix(p: PauliString) -> np.ndarray:
    return p.coefficient * np.kron(SIGMA[p.first], SIGMA[p.second])


def pauli_product(p: PauliString, q: PauliString) -> PauliString:
    a, ka = _single_product(p.first, q.first)
    b, kb = _single_product(p.second, q.second)
    return PauliString(a, b, p.phase + q.phase + ka + kb)


def _single_anticommutes(a: int, b: int) -> bool:
    return a != 0 and b != 0 and a != b


def anticommutes(p: PauliString, q: PauliString) -> bool:
    return _single_anticommutes(p.first, q.first) != _single_anticommutes(p.second, q.second)


def commutes(p: PauliString, q: PauliString) -> bool:
    return not anticommutes(p, q)


def all_strings(include_identity: bool = False) -> list[PauliString]:
    out = [PauliString(a, b) for a, b in itertools.product(range(4), repeat=2)]
    return out if include_identity else out[1:]


def expand(A) -> np.ndarray:
    """Coefficients a[i, j] = <sigma_i (x) sigma_j, A> in the Pauli basis."""
    A = as_cmat(A)
    if A.shape != (4, 4):
        raise ValueError(f"expand needs a 4x4 matrix, got {A.shape}")
    # Tr((s_i (x) s_j)^* A)/4 via einsum over the 2x2x2x2 reshaping
    T = A.reshape(2, 2, 2, 2)
    S = np.stack(SIGMA)
    return np.einsum("iab,jcd,acbd->ij", S.conj(), S.conj(), T) / 4


def reconstruct(coeffs) -> np.ndarray:
    """Inverse of :func:`expand`."""
    C = np.asarray(coeffs, dtype=complex).reshape(4, 4)
    S = np.stack(SIGMA)
    return np.einsum("ij,iab,jcd->acbd", C, S, S).reshape(4, 4)


def pauli_inner(p: PauliString, q: PauliString) -> complex:
    return hs_inner(pauli_matrix(p), pauli_matrix(q))

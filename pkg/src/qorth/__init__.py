"""Complementary M2 subalgebras of M4: verification, Cartan decomposition and search."""
from .canonical import CanonicalAngles, canonical_N, in_class_N, is_useful
from .core import DecompositionError, haar_random_unitary, hs_inner
from .kak import KakDecomposition, kak_decompose
from .pauli import PauliString
from .search import SearchConfig, SearchResult, continuous_search, max_disjoint_family
from .subalgebra import A0, B, Subalgebra, from_pauli_triple, from_unitary, is_complementary, overlap
from .theorems import FamilyReport, family_audit

__version__ = "0.1.0"

__all__ = [
    "A0", "B", "CanonicalAngles", "DecompositionError", "FamilyReport", "KakDecomposition",
    "PauliString", "SearchConfig", "SearchResult", "Subalgebra", "canonical_N",
    "continuous_search", "family_audit", "from_pauli_triple", "from_unitary",
    "haar_random_unitary", "hs_inner", "in_class_N", "is_complementary", "is_useful",
    "kak_decompose", "max_disjoint_family", "overlap",
]

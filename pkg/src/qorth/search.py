"""Searching for large families of pairwise complementary M_2 subalgebras.

Two engines:

* a discrete one over subalgebras generated by Pauli triples, where
  complementarity reduces to the triples using disjoint sets of Pauli
  strings, so a maximum family is a maximum clique in a 20-vertex graph;
* a continuous one that minimizes the summed pairwise overlap of k members
  (the first fixed to C I (x) M_2), each member written as
  (L1 (x) L2) N(alpha, beta, gamma) applied to C I (x) M_2.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .canonical import CanonicalAngles, canonical_N
from .core import I2, SIGMA
from .optimize import restarted_nelder_mead
from .pauli import PauliString, all_strings, anticommutes, pauli_product
from .subalgebra import A0, Subalgebra, from_pauli_triple, from_unitary, overlap

PARAMS_PER_MEMBER = 11


# ---------------------------------------------------------------- discrete

@dataclass(frozen=True)
class TripleCatalog:
    triples: tuple

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)


def _triple_key(t) -> tuple:
    return tuple(sorted((p.first, p.second) for p in t))


def enumerate_triples() -> TripleCatalog:
    """All closed, pairwise anticommuting triples of non-identity Pauli strings."""
    found = []
    strings = all_strings()
    for p, q, r in itertools.combinations(strings, 3):
        if not (anticommutes(p, q) and anticommutes(p, r) and anticommutes(q, r)):
            continue
        if pauli_product(p, q).unsigned() == r:
            found.append((p, q, r))
    return TripleCatalog(tuple(found))


def triple_subalgebra(t) -> Subalgebra:
    return from_pauli_triple(*t)


def triple_text(t) -> list[str]:
    return [str(p) for p in t]


def _disjoint(s, t) -> bool:
    return not ({p.unsigned() for p in s} & {p.unsigned() for p in t})


def _max_cliques(adj: list[set]) -> list[frozenset]:
    """All maximum cliques (Bron-Kerbosch with pivoting)."""
    best: list[frozenset] = []
    size = [0]

    def expand(R, P, X):
        if not P and not X:
            if len(R) > size[0]:
                size[0] = len(R)
                best.clear()
            if len(R) == size[0]:
                best.append(frozenset(R))
            return
        if len(R) + len(P) < size[0]:
            return
        pivot = max(P | X, key=lambda u: len(adj[u] & P))
        for v in sorted(P - adj[pivot]):
            expand(R | {v}, P & adj[v], X & adj[v])
            P = P - {v}
            X = X | {v}

    expand(set(), set(range(len(adj))), set())
    return best


def max_disjoint_family(catalog: TripleCatalog | None = None, must_include=None):
    """Largest families of Pauli triples with pairwise disjoint strings.

    Returns ``(max_size, witnesses)``; each witness is a list of triples in
    catalog order. With ``must_include`` only families containing that
    triple are considered.
    """
    catalog = catalog or enumerate_triples()
    triples = list(catalog)
    if must_include is not None:
        key = _triple_key([p if isinstance(p, PauliString) else PauliString.parse(p)
                           for p in must_include])
        matches = [i for i, t in enumerate(triples) if _triple_key(t) == key]
        if not matches:
            raise ValueError("must_include triple is not in the catalog")
        anchor = matches[0]
        keep = [anchor] + [i for i, t in enumerate(triples)
                           if i != anchor and _disjoint(t, triples[anchor])]
    else:
        keep = list(range(len(triples)))
    sub = [triples[i] for i in keep]
    adj = [{j for j in range(len(sub)) if j != i and _disjoint(sub[i], sub[j])}
           for i in range(len(sub))]
    if must_include is not None:
        # every kept triple is disjoint from the anchor at position 0
        rest = [{j - 1 for j in a if j != 0} for a in adj[1:]]
        cliques = [frozenset({0} | {j + 1 for j in c}) for c in _max_cliques(rest)] \
            if rest else [frozenset({0})]
    else:
        cliques = _max_cliques(adj)
    size = max(len(c) for c in cliques)
    witnesses = sorted(sorted(keep[i] for i in c) for c in cliques)
    return size, [[triples[i] for i in w] for w in witnesses]


def leftover_strings(family) -> list[PauliString]:
    """Non-identity Pauli strings used by no triple of ``family``."""
    used = {p.unsigned() for t in family for p in t}
    return [p for p in all_strings() if p not in used]


# -------------------------------------------------------------- continuous

@dataclass
class SearchConfig:
    """Continuous search settings.

    ``max_iters`` is the objective-evaluation budget of one restart; ``step``
    is the initial simplex edge for angles (quaternion edges use
    ``quat_step``) and ``shrink`` scales both on each simplex rebuild.
    """
    k: int = 4
    restarts: int = 50
    max_iters: int = 20_000
    seed: int = 0
    step: float = math.pi / 8
    quat_step: float = 0.3
    shrink: float = 0.5
    penalty_tol: float = 1e-3
    target: float = 1e-12

    def validate(self) -> None:
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not (self.step > 0 and self.quat_step > 0 and 0 < self.shrink <= 1):
            raise ValueError("step sizes must be positive and 0 < shrink <= 1")


@dataclass
class MemberParams:
    """One free family member: canonical angles and two unit quaternions."""
    angles: tuple
    q1: tuple
    q2: tuple

    @classmethod
    def from_vector(cls, x) -> "MemberParams":
        x = [float(v) for v in x]
        return cls(tuple(x[0:3]), tuple(x[3:7]), tuple(x[7:11]))

    def vector(self) -> np.ndarray:
        return np.array([*self.angles, *self.q1, *self.q2], dtype=float)

    def unitary(self) -> np.ndarray:
        return np.kron(quaternion_su2(self.q1), quaternion_su2(self.q2)) @ canonical_N(
            CanonicalAngles(*self.angles))

    def subalgebra(self) -> Subalgebra:
        return from_unitary(self.unitary())


@dataclass
class SearchResult:
    best_penalty: float
    family: list
    per_restart_log: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def subalgebras(self) -> list[Subalgebra]:
        return [A0()] + [m.subalgebra() for m in self.family]

    @staticmethod
    def family_from_params(params) -> list[Subalgebra]:
        """A0 followed by the members encoded in a flat parameter vector."""
        rows = np.asarray(params, dtype=float).reshape(-1, PARAMS_PER_MEMBER)
        return [A0()] + [MemberParams.from_vector(r).subalgebra() for r in rows]

    def to_json(self) -> dict:
        return {
            "best_penalty": self.best_penalty,
            "family": [asdict(m) for m in self.family],
            "per_restart_log": [dict(r) for r in self.per_restart_log],
            "config": dict(self.config),
        }


def quaternion_su2(q) -> np.ndarray:
    """q0 I + i (q1 X + q2 Y + q3 Z), normalized to SU(2)."""
    q = np.asarray(q, dtype=float)
    norm = np.linalg.norm(q)
    if norm < 1e-12:
        raise ValueError("zero quaternion does not define a local unitary")
    q = q / norm
    return q[0] * I2 + 1j * (q[1] * SIGMA[1] + q[2] * SIGMA[2] + q[3] * SIGMA[3])


def _rotations(q: np.ndarray) -> np.ndarray:
    """Adjoint action of quaternion_su2(q) on (I, X, Y, Z) coordinates, batched."""
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w = q[..., 0]
    x, y, z = -q[..., 1], -q[..., 2], -q[..., 3]
    R = np.zeros(q.shape[:-1] + (4, 4))
    R[..., 0, 0] = 1.0
    R[..., 1, 1:] = np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], -1)
    R[..., 2, 1:] = np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], -1)
    R[..., 3, 1:] = np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], -1)
    return R


# Pauli-grid positions (p, q) of N (I (x) s_i) N^* and which product of
# cos/sin of doubled angles sits there; see canonical_images.
_IMAGE_SLOTS = (
    # member, p, q, sign, (angle index, use sin) x 2
    (0, 0, 1, 1, (1, 0), (2, 0)),
    (0, 3, 2, -1, (1, 0), (2, 1)),
    (0, 2, 3, 1, (1, 1), (2, 0)),
    (0, 1, 0, 1, (1, 1), (2, 1)),
    (1, 0, 2, 1, (0, 0), (2, 0)),
    (1, 3, 1, 1, (0, 0), (2, 1)),
    (1, 1, 3, -1, (0, 1), (2, 0)),
    (1, 2, 0, 1, (0, 1), (2, 1)),
    (2, 0, 3, 1, (0, 0), (1, 0)),
    (2, 2, 1, -1, (0, 0), (1, 1)),
    (2, 1, 2, 1, (0, 1), (1, 0)),
    (2, 3, 0, 1, (0, 1), (1, 1)),
)
_SLOT_FLAT = np.array([i * 16 + p * 4 + q for i, p, q, *_ in _IMAGE_SLOTS])
_SLOT_SIGN = np.array([s for *_, s, _, _ in _IMAGE_SLOTS], dtype=float)
_SLOT_A = np.array([2 * a + u for *_, (a, u), _ in _IMAGE_SLOTS])
_SLOT_B = np.array([2 * a + u for *_, (a, u) in _IMAGE_SLOTS])


def canonical_images(a: np.ndarray) -> np.ndarray:
    """Real Pauli coordinates of N (I (x) s_i) N^*, shape (m, 3, 4, 4).

    Row i holds coefficient [p, q] of s_p (x) s_q. Closed form: conjugation
    by N rotates I (x) s_1 within {IX, ZY, YZ, XI} by the doubled angles
    beta and gamma, and likewise for the other two generators.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    m = a.shape[0]
    trig = np.empty((m, 6))
    trig[:, 0::2] = np.cos(2 * a)
    trig[:, 1::2] = np.sin(2 * a)
    out = np.zeros((m, 48))
    out[:, _SLOT_FLAT] = _SLOT_SIGN * trig[:, _SLOT_A] * trig[:, _SLOT_B]
    return out.reshape(m, 3, 4, 4)


_A0_VECTORS = np.zeros((3, 16))
_A0_VECTORS[0, 1] = _A0_VECTORS[1, 2] = _A0_VECTORS[2, 3] = 1.0


def member_vectors(x) -> np.ndarray:
    """Pauli coordinates of the traceless bases of the free members, shape (m, 3, 16)."""
    x = np.asarray(x, dtype=float).reshape(-1, PARAMS_PER_MEMBER)
    G = canonical_images(x[:, 0:3])
    R = _rotations(x[:, 3:11].reshape(-1, 2, 4))
    C = R[:, None, 0] @ G @ np.swapaxes(R[:, None, 1], -1, -2)
    return C.reshape(-1, 3, 16)


class FamilyPenalty:
    """F(x) = sum over member pairs of overlap, with C I (x) M_2 as member 0."""

    def __init__(self, k: int):
        self.k = k
        mask = np.triu(np.ones((k, k)), 1)
        self._mask = np.kron(mask, np.ones((3, 3)))

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        q = x.reshape(-1, PARAMS_PER_MEMBER)[:, 3:]
        if np.any(np.linalg.norm(q.reshape(-1, 4), axis=1) < 1e-12):
            return 3.0 * self.k * (self.k - 1) / 2
        V = np.concatenate([_A0_VECTORS, member_vectors(x).reshape(-1, 16)])
        G = V @ V.T
        return float(np.sum(G * G * self._mask))


def penalty(family) -> float:
    """Summed pairwise overlap of A0 plus the given members.

    Members may be :class:`MemberParams` or subalgebras.
    """
    subs = [A0()] + [m.subalgebra() if isinstance(m, MemberParams) else m for m in family]
    return float(sum(overlap(subs[i], subs[j])
                     for i in range(len(subs)) for j in range(i + 1, len(subs))))


def _initial_point(rng, k: int) -> np.ndarray:
    rows = []
    for _ in range(k - 1):
        quats = []
        for _ in range(2):
            q = rng.standard_normal(4)
            while np.linalg.norm(q) < 1e-6:
                q = rng.standard_normal(4)
            quats.append(q / np.linalg.norm(q))
        rows.append(np.concatenate([rng.uniform(-math.pi, math.pi, 3), *quats]))
    return np.concatenate(rows)


def run_restart(cfg: SearchConfig, index: int) -> tuple[float, np.ndarray, dict]:
    """One restart; a pure function of (cfg, index)."""
    rng = np.random.default_rng([cfg.seed, index])
    f = FamilyPenalty(cfg.k)
    x0 = _initial_point(rng, cfg.k)
    steps = np.tile([cfg.step] * 3 + [cfg.quat_step] * 8, cfg.k - 1)
    res = restarted_nelder_mead(f, x0, steps, max_evals=cfg.max_iters,
                                target=cfg.target, shrink=cfg.shrink)
    # renormalize quaternions so the reported parameters are canonical
    x = res.x.reshape(-1, PARAMS_PER_MEMBER).copy()
    for col in (slice(3, 7), slice(7, 11)):
        x[:, col] /= np.linalg.norm(x[:, col], axis=1, keepdims=True)
    x = x.ravel()
    log = {"restart": index, "seed": [cfg.seed, index], "penalty": f(x),
           "evaluations": res.nfev, "iterations": res.nit, "params": x.tolist()}
    return log["penalty"], x, log


def continuous_search(cfg: SearchConfig, progress=None) -> SearchResult:
    """Multi-start simplex minimization of the family penalty.

    The best restart is chosen by (penalty, restart index), so the result
    does not depend on the order restarts are evaluated in.
    """
    cfg.validate()
    runs = []
    for i in range(cfg.restarts):
        pen, x, log = run_restart(cfg, i)
        runs.append((pen, i, x, log))
        if progress is not None:
            progress(log)
    pen, _, x, _ = min(runs, key=lambda r: (r[0], r[1]))
    family = [MemberParams.from_vector(row) for row in x.reshape(-1, PARAMS_PER_MEMBER)]
    return SearchResult(pen, family, [r[3] for r in runs], asdict(cfg))

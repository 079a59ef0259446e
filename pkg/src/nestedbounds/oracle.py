"""Exact finite probability model for cut-set systems.

An :class:`AtomSystem` puts an arbitrary joint distribution on the up/down
states of ``n_el`` binary elements (an atom is a bitmask, bit ``j`` set means
element ``j`` is down) and defines each cut-set event as "all of its elements
are down".  Every joint probability of cut-set events is then an exact sum
over atoms, which makes the system a ground truth for the union probability.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .matrix import ProbabilityMatrix

MAX_ELEMENTS = 12
INCLUSION_EXCLUSION_MAX = 10


class AtomSystemError(ValueError):
    """Raised for malformed atom systems."""


@dataclass(frozen=True, eq=False)
class AtomSystem:
    n_el: int
    atom_probs: np.ndarray
    cut_sets: tuple[frozenset[int], ...]  # 0-based element indices

    def __post_init__(self):
        if not 1 <= self.n_el <= MAX_ELEMENTS:
            raise AtomSystemError(f"n_el={self.n_el} outside 1..{MAX_ELEMENTS}")
        probs = np.array(self.atom_probs, dtype=np.float64)
        if probs.shape != (1 << self.n_el,):
            raise AtomSystemError(f"expected {1 << self.n_el} atom probabilities, got {probs.shape}")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-12:
            raise AtomSystemError("atom probabilities must be non-negative and sum to 1")
        probs.setflags(write=False)
        object.__setattr__(self, "atom_probs", probs)
        cuts = tuple(frozenset(int(e) for e in c) for c in self.cut_sets)
        if not cuts:
            raise AtomSystemError("at least one cut set is required")
        for c in cuts:
            if not c:
                raise AtomSystemError("cut sets must be non-empty")
            if min(c) < 0 or max(c) >= self.n_el:
                raise AtomSystemError(f"cut set {sorted(e + 1 for e in c)} references an unknown element")
        for a, b in itertools.permutations(range(len(cuts)), 2):
            if cuts[a] <= cuts[b]:
                raise AtomSystemError(f"cut set {b + 1} contains cut set {a + 1}; cut sets must be minimal")
        object.__setattr__(self, "cut_sets", cuts)

    @property
    def n(self) -> int:
        return len(self.cut_sets)

    def _masks(self) -> np.ndarray:
        return np.array([sum(1 << e for e in c) for c in self.cut_sets], dtype=np.int64)


def cutset_event_mask(system: AtomSystem, i: int) -> np.ndarray:
    """Boolean array over atoms: True where every element of cut set ``i`` is down."""
    if not 0 <= i < system.n:
        raise IndexError(f"cut set {i} outside 0..{system.n - 1}")
    atoms = np.arange(1 << system.n_el, dtype=np.int64)
    need = system._masks()[i]
    return (atoms & need) == need


def joint_probability(system: AtomSystem, subset: Sequence[int]) -> float:
    """Probability that all cut sets in ``subset`` occur together."""
    subset = list(subset)
    if not subset:
        raise ValueError("subset must be non-empty")
    mask = np.ones(1 << system.n_el, dtype=bool)
    for i in subset:
        mask &= cutset_event_mask(system, i)
    return float(system.atom_probs[mask].sum())


def inclusion_exclusion(system: AtomSystem) -> float:
    """Union probability from the alternating sum over all non-empty subsets."""
    total = 0.0
    for k in range(1, system.n + 1):
        sign = 1.0 if k % 2 else -1.0
        for subset in itertools.combinations(range(system.n), k):
            total += sign * joint_probability(system, subset)
    return total


def atom_union_probability(system: AtomSystem, cross_check: bool = True) -> float:
    """Exact probability that at least one cut set occurs.

    For ``n <= 10`` cut sets the atom sum is also checked against full
    inclusion-exclusion.
    """
    covered = np.zeros(1 << system.n_el, dtype=bool)
    for i in range(system.n):
        covered |= cutset_event_mask(system, i)
    value = float(system.atom_probs[covered].sum())
    if cross_check and system.n <= INCLUSION_EXCLUSION_MAX:
        other = inclusion_exclusion(system)
        if abs(other - value) > 1e-10:
            raise ArithmeticError(f"atom sum {value!r} disagrees with inclusion-exclusion {other!r}")
    return value


def project_second_order(system: AtomSystem) -> ProbabilityMatrix:
    n = system.n
    events = [cutset_event_mask(system, i) for i in range(n)]
    p = np.empty((n, n))
    for i in range(n):
        p[i, i] = system.atom_probs[events[i]].sum()
        for j in range(i + 1, n):
            p[i, j] = p[j, i] = system.atom_probs[events[i] & events[j]].sum()
    return ProbabilityMatrix(p)


def independent_system(down_probs: Sequence[float], cut_sets: Sequence[Sequence[int]]) -> AtomSystem:
    """System with mutually independent elements, element ``j`` down with ``down_probs[j]``."""
    q = np.asarray(down_probs, dtype=float)
    n_el = len(q)
    atoms = np.arange(1 << n_el)
    probs = np.ones(1 << n_el)
    for j in range(n_el):
        down = (atoms >> j) & 1
        probs *= np.where(down == 1, q[j], 1.0 - q[j])
    probs /= probs.sum()
    return AtomSystem(n_el, probs, tuple(frozenset(c) for c in cut_sets))


def random_system(n_el: int, n: int, seed: int, max_tries: int = 1000) -> AtomSystem:
    """Random atom distribution (uniform on the simplex) and ``n`` minimal cut sets.

    Cut sets are random non-empty element subsets; a draw that contains or is
    contained in an existing cut set is discarded and redrawn.  When earlier
    picks leave no room for the rest, the cut-set draw restarts from scratch
    (same generator, so still deterministic per seed).
    """
    if not 1 <= n_el <= MAX_ELEMENTS:
        raise ValueError(f"n_el={n_el} outside 1..{MAX_ELEMENTS}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > math.comb(n_el, n_el // 2):
        raise ValueError(f"no {n} minimal cut sets exist over {n_el} elements")
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(1 << n_el))
    probs /= probs.sum()
    for _ in range(max_tries):
        cuts: list[frozenset[int]] = []
        misses = 0
        while len(cuts) < n and misses < 100:
            size = int(rng.integers(1, n_el + 1))
            c = frozenset(int(e) for e in rng.choice(n_el, size=size, replace=False))
            if any(c <= d or d <= c for d in cuts):
                misses += 1
                continue
            cuts.append(c)
        if len(cuts) == n:
            return AtomSystem(n_el, probs, tuple(cuts))
    raise ValueError(f"could not draw {n} minimal cut sets over {n_el} elements")


def system_from_dict(doc: dict) -> AtomSystem:
    cuts = tuple(frozenset(int(e) - 1 for e in c) for c in doc["cut_sets"])
    return AtomSystem(int(doc["n_el"]), np.asarray(doc["atom_probs"], dtype=float), cuts)


def system_to_dict(system: AtomSystem) -> dict:
    return {
        "n_el": system.n_el,
        "atom_probs": system.atom_probs.tolist(),
        "cut_sets": [sorted(e + 1 for e in c) for c in system.cut_sets],
    }


def load_system(path: str | Path) -> AtomSystem:
    with open(path) as fh:
        return system_from_dict(json.load(fh))


def save_system(system: AtomSystem, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_dict(system), fh)
        fh.write("\n")

"""Sufficient conditions for strict improvement between consecutive levels."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import LevelError
from .matrix import ProbabilityMatrix, check_ordering


@dataclass(frozen=True)
class ConditionWitness:
    """Witness in permuted (position) coordinates, 0-based.

    For condition 1 ``indices`` is the triplet ``(a, b, c)``; for condition 2
    it is ``(i,)``, the line at which every (m+1)-subset qualifies.
    """

    kind: int
    indices: tuple[int, ...]
    level: int | None = None

    def to_dict(self) -> dict:
        d = {"condition": self.kind, "indices": [k + 1 for k in self.indices]}
        if self.level is not None:
            d["level"] = self.level
        return d


def _permuted(matrix: ProbabilityMatrix, ordering: Sequence[int] | None) -> np.ndarray:
    n = matrix.n
    sigma = check_ordering(range(n) if ordering is None else ordering, n)
    return matrix.p[np.ix_(sigma, sigma)]


def condition1(matrix: ProbabilityMatrix, ordering: Sequence[int] | None = None) -> ConditionWitness | None:
    """Find positions ``a, b < c`` with ``P_ac = max_{j<c} P_jc >= P_bc > P_ab``.

    Every argmax of column ``c`` is tried as ``a``.
    """
    if matrix.n < 3:
        raise ValueError("condition 1 needs at least 3 events")
    q = _permuted(matrix, ordering)
    n = matrix.n
    for c in range(2, n):
        col = q[:c, c]
        top = col.max()
        for a in np.flatnonzero(col == top):
            for b in range(c):
                if b != a and q[b, c] > q[a, b]:
                    return ConditionWitness(1, (int(a), b, c))
    return None


def condition2_rhs(q: np.ndarray, i: int, subset: Sequence[int], r: int) -> float:
    """``sum_{s != r} min(P_{j_s i}, P_{j_r j_s})`` for one member ``r`` of ``subset``."""
    jr = subset[r]
    total = 0.0
    for s, js in enumerate(subset):
        if s != r:
            total += min(q[js, i], q[jr, js])
    return total


def _condition2_line(q: np.ndarray, m: int, i: int) -> bool:
    for subset in itertools.combinations(range(i), m + 1):
        for r, jr in enumerate(subset):
            if not q[jr, i] > condition2_rhs(q, i, subset, r):
                return False
    return True


def condition2_at(matrix: ProbabilityMatrix, ordering: Sequence[int] | None, m: int, i: int) -> bool:
    """Whether every (m+1)-subset of positions before ``i`` satisfies the strict
    inequalities.  ``i`` is a 0-based position with ``m + 1 < i + 1``."""
    n = matrix.n
    if m < 1 or not m + 1 < i + 1 <= n:
        raise LevelError(f"need m+1 < i <= n (1-based); got m={m}, i={i + 1}, n={n}")
    return _condition2_line(_permuted(matrix, ordering), m, i)


def condition2_any(matrix: ProbabilityMatrix, ordering: Sequence[int] | None, m: int) -> ConditionWitness | None:
    """Smallest line at which condition 2 holds for level ``m``, if any."""
    n = matrix.n
    if not 1 <= m <= n - 1:
        raise LevelError(f"level {m} outside 1..{n - 1}")
    q = _permuted(matrix, ordering)
    for i in range(m + 1, n):
        if _condition2_line(q, m, i):
            return ConditionWitness(2, (i,), m)
    return None


def count_orderings_condition1(n: int, c: int) -> int:
    """Lower count of orderings that inherit condition 1 from column ``c`` (1-based)."""
    if not 3 <= c <= n:
        raise ValueError(f"column {c} outside 3..{n}")
    return sum(
        math.comb(c - 3, j) * math.factorial(j + 2) * math.factorial(n - 3 - j)
        for j in range(c - 2)
    )

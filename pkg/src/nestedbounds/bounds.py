"""Level-m second-order upper bounds on a union probability.

Line ``i`` of the bound subtracts from ``P_i`` a lower bound on
``P(C_1 C_i ∪ ... ∪ C_{i-1} C_i)`` built from at most ``m`` of the pairwise
events ``C_j C_i``.  For a sequence ``j_1, ..., j_t`` of distinct predecessors
the lower bound is

    sum_r [ P_{j_r i} - sum_{s<r} min(P_{j_r i}, P_{j_s i}, P_{j_r j_s}) ]^+

and the line deduction is its maximum over all such sequences with
``t = min(m, i-1)``.  Level 1 is the KVHD bound.

Because each term is clipped at zero, the maximum over sequences equals the
maximum over predecessor subsets ``S`` with ``|S| <= t`` of the order-free sum
``sum_{j in S} P_ji - sum_{j<k in S} min(P_ji, P_ki, P_jk)``: appending an
element never lowers a sequence's value, and removing an element whose term
was clipped never lowers it either.  The engine enumerates subsets, which is
``2^(i-1)`` work per line instead of ``e (i-1)!``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matrix import ProbabilityMatrix, check_ordering


class LevelError(ValueError):
    """Raised when a level lies outside ``1..n-1``."""


@dataclass(frozen=True)
class LevelBounds:
    ordering: tuple[int, ...]
    values: tuple[float, ...]  # values[m-1] is the level-m bound

    def __getitem__(self, m: int) -> float:
        """1-based access: ``lb[1]`` is the KVHD bound."""
        if not 1 <= m <= len(self.values):
            raise IndexError(m)
        return self.values[m - 1]

    def is_non_increasing(self) -> bool:
        return all(b <= a for a, b in zip(self.values, self.values[1:]))


def _check_level(m: int, n: int) -> None:
    if n > 1 and not 1 <= m <= n - 1:
        raise LevelError(f"level {m} outside 1..{n - 1}")
    if m < 1:
        raise LevelError(f"level {m} must be >= 1")


def line_deductions(q: np.ndarray, max_level: int) -> np.ndarray:
    """Deductions for every line and every level ``1..max_level``.

    ``q`` holds one or more already-permuted matrices, shape ``(..., n, n)``.
    Returns shape ``(..., n, max_level)``; entry ``[..., i, m-1]`` is the
    level-m deduction of 0-based line ``i``.
    """
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[-1]
    batch = q.shape[:-2]
    out = np.zeros(batch + (n, max_level))
    for i in range(1, n):
        depth = min(max_level, i)
        a = q[..., :i, i]
        # pairwise minima are shared by every subset of this line
        w = np.minimum(np.minimum(a[..., :, None], a[..., None, :]), q[..., :i, :i])
        best = np.zeros(batch + (depth + 1,))
        # depth-first over increasing index tuples: (last index, size, value, acc)
        # acc[..., k] = sum of w[..., k, s] over members s of the subset
        stack = [(-1, 0, np.zeros(batch), np.zeros(batch + (i,)))]
        while stack:
            last, size, value, acc = stack.pop()
            if size:
                np.maximum(best[..., size], value, out=best[..., size])
            if size == depth:
                continue
            for k in range(i - 1, last, -1):
                gain = a[..., k] - acc[..., k]
                child_acc = acc + w[..., :, k] if size + 1 < depth else acc
                stack.append((k, size + 1, value + gain, child_acc))
        best = np.maximum.accumulate(best, axis=-1)
        for m in range(1, max_level + 1):
            out[..., i, m - 1] = best[..., min(m, i)]
    return out


def level_bounds_array(q: np.ndarray, max_level: int, clip: bool = True) -> np.ndarray:
    """Bounds ``B_1..B_L`` for permuted matrices ``q`` of shape ``(..., n, n)``.

    Each line term ``P_i - D_i`` is floored at 0.  For matrices that come
    from a real probability measure the floor never binds.  Pairwise-consistent
    matrices with no underlying measure can have ``D_i > P_i``; there the
    floor can hide a strict gain between levels, and ``clip=False`` sums the
    raw terms instead.  Lines are accumulated in index order, so each value is
    bitwise reproducible regardless of batch composition.
    """
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[-1]
    ded = line_deductions(q, max_level)
    diag = np.diagonal(q, axis1=-2, axis2=-1)
    total = np.zeros(q.shape[:-2] + (max_level,))
    for i in range(n):
        term = diag[..., i, None] - ded[..., i, :]
        total += np.maximum(term, 0.0) if clip else term
    return total


def permute_stack(p: np.ndarray, orderings: np.ndarray) -> np.ndarray:
    """``q[k, a, b] = p[orderings[k, a], orderings[k, b]]``; ``p`` may carry batch dims."""
    o = np.asarray(orderings)
    return p[..., o[:, :, None], o[:, None, :]]


def bounds_for_orderings(
    matrix: ProbabilityMatrix, orderings: np.ndarray, max_level: int, clip: bool = True
) -> np.ndarray:
    """Array ``(len(orderings), max_level)`` of bounds, one row per ordering."""
    n = matrix.n
    if n == 1:
        return np.full((len(orderings), max(max_level, 1)), matrix.p[0, 0])
    _check_level(max_level, n)
    return level_bounds_array(permute_stack(matrix.p, orderings), max_level, clip)


def line_deduction(matrix: ProbabilityMatrix, i: int, m: int) -> float:
    """Level-m deduction of 0-based line ``i`` in the identity ordering."""
    n = matrix.n
    if not 0 <= i < n:
        raise IndexError(f"line {i} outside 0..{n - 1}")
    if n == 1:
        return 0.0
    _check_level(m, n)
    if i == 0:
        return 0.0
    sub = matrix.p[: i + 1, : i + 1]
    return float(line_deductions(sub, min(m, i))[i, -1])


def bound(
    matrix: ProbabilityMatrix, ordering: Sequence[int] | None = None, m: int = 1, clip: bool = True
) -> float:
    """Level-m upper bound ``B_m`` for the cut sets taken in ``ordering``."""
    n = matrix.n
    sigma = check_ordering(range(n) if ordering is None else ordering, n)
    if n == 1:
        return float(matrix.p[0, 0])
    _check_level(m, n)
    q = matrix.p[np.ix_(sigma, sigma)]
    return float(level_bounds_array(q, m, clip)[m - 1])


def bound_all_levels(
    matrix: ProbabilityMatrix,
    ordering: Sequence[int] | None = None,
    max_level: int | None = None,
    clip: bool = True,
) -> LevelBounds:
    n = matrix.n
    sigma = check_ordering(range(n) if ordering is None else ordering, n)
    if n == 1:
        return LevelBounds(sigma, (float(matrix.p[0, 0]),))
    if max_level is None:
        max_level = n - 1
    _check_level(max_level, n)
    q = matrix.p[np.ix_(sigma, sigma)]
    return LevelBounds(sigma, tuple(float(v) for v in level_bounds_array(q, max_level, clip)))

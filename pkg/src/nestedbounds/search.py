"""Exhaustive search over orderings and summary statistics per level."""

from __future__ import annotations

import csv
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .bounds import _check_level, bound, bounds_for_orderings
from .matrix import ProbabilityMatrix, format_ordering

DEFAULT_CAP = 10
REL_TOL = 1e-9
ABS_FLOOR = 1e-15
CHUNK = 8192


class SearchCapError(ValueError):
    """Raised when n! orderings would exceed the configured cap."""


def tie_slack(reference: float, tolerance: float = REL_TOL) -> float:
    return max(tolerance * abs(reference), ABS_FLOOR)


def strictly_less(a, b, tolerance: float = REL_TOL):
    """``a < b`` beyond the tie tolerance used for minimizer counting."""
    b = np.asarray(b)
    return np.asarray(a) < b - np.maximum(tolerance * np.abs(b), ABS_FLOOR)


@dataclass
class SearchSummary:
    level: int
    min: float
    max: float
    mean: float
    median: float
    cov: float
    minimizer_count: int
    argmin_orderings: list[tuple[int, ...]] = field(default_factory=list)
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["argmin_orderings"] = [[k + 1 for k in o] for o in self.argmin_orderings]
        return d


def summary_stats(values: Sequence[float], ddof: int = 1) -> tuple[float, float, float, float]:
    """Mean, median, standard deviation and COV (= SD / mean).

    ``ddof=1`` (sample SD) is the default; it is the convention that
    reproduces the published COV columns.  A single value has SD 0.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("summary_stats needs at least one value")
    mean = float(np.mean(v))
    median = float(np.median(v))
    sd = float(np.std(v, ddof=ddof)) if v.size > ddof else 0.0
    cov = sd / mean if mean != 0 else math.nan
    return mean, median, sd, cov


def lex_permutations(n: int, prefix: Sequence[int] = ()) -> np.ndarray:
    """All orderings of ``range(n)`` starting with ``prefix``, in lexicographic order."""
    rest = [k for k in range(n) if k not in prefix]
    table = np.zeros((1, 0), dtype=np.int16)
    for size in range(1, len(rest) + 1):
        # table holds lexicographic permutations of range(size - 1); extend by one symbol
        blocks = []
        for first in range(size):
            others = table.copy()
            others[others >= first] += 1
            blocks.append(np.hstack([np.full((len(others), 1), first, dtype=np.int16), others]))
        table = np.vstack(blocks)
    perms = np.asarray(rest, dtype=np.int16)[table]
    if prefix:
        head = np.broadcast_to(np.asarray(prefix, dtype=np.int16), (len(perms), len(prefix)))
        perms = np.hstack([head, perms])
    return perms


def _block_prefixes(n: int) -> list[tuple[int, ...]]:
    depth = 2 if n >= 3 else (1 if n >= 2 else 0)
    return list(itertools.permutations(range(n), depth))


def _evaluate_block(args) -> tuple[np.ndarray, np.ndarray]:
    p, prefix, max_level = args
    matrix = ProbabilityMatrix(p)
    perms = lex_permutations(matrix.n, prefix)
    out = np.empty((len(perms), max_level))
    for start in range(0, len(perms), CHUNK):
        stop = start + CHUNK
        out[start:stop] = bounds_for_orderings(matrix, perms[start:stop], max_level)
    return perms, out


def all_level_bounds(
    matrix: ProbabilityMatrix, max_level: int | None = None, workers: int = 1, cap: int = DEFAULT_CAP
) -> tuple[np.ndarray, np.ndarray]:
    """Every ordering (lexicographic) and its bounds at levels ``1..max_level``."""
    n = matrix.n
    if n > cap:
        raise SearchCapError(
            f"n={n} exceeds the exhaustive cap {cap} ({math.factorial(n)} orderings); "
            "use greedy_ordering for a heuristic bound or raise the cap"
        )
    if max_level is None:
        max_level = max(n - 1, 1)
    if n > 1:
        _check_level(max_level, n)
    jobs = [(matrix.p, prefix, max_level) for prefix in _block_prefixes(n)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_block, jobs))
    else:
        parts = [_evaluate_block(job) for job in jobs]
    return np.vstack([pp for pp, _ in parts]), np.vstack([v for _, v in parts])


def summarize(
    orderings: np.ndarray,
    values: np.ndarray,
    tolerance: float = REL_TOL,
    max_argmin: int = 24,
    wall_time: float = 0.0,
    ddof: int = 1,
) -> list[SearchSummary]:
    summaries = []
    for col in range(values.shape[1]):
        v = values[:, col]
        lo = float(v.min())
        hits = np.flatnonzero(v <= lo + tie_slack(lo, tolerance))
        mean, median, _, cov = summary_stats(v, ddof=ddof)
        summaries.append(SearchSummary(
            level=col + 1,
            min=lo,
            max=float(v.max()),
            mean=mean,
            median=median,
            cov=cov,
            minimizer_count=int(hits.size),
            argmin_orderings=[tuple(int(k) for k in orderings[h]) for h in hits[:max_argmin]],
            wall_time=wall_time,
        ))
    return summaries


def exhaustive_search(
    matrix: ProbabilityMatrix,
    max_level: int | None = None,
    tolerance: float = REL_TOL,
    *,
    workers: int = 1,
    cap: int = DEFAULT_CAP,
    max_argmin: int = 24,
) -> list[SearchSummary]:
    """Per-level statistics over all ``n!`` orderings.

    ``wall_time`` is the time of the single pass that evaluates every level.
    """
    t0 = time.perf_counter()
    orderings, values = all_level_bounds(matrix, max_level, workers=workers, cap=cap)
    elapsed = time.perf_counter() - t0
    return summarize(orderings, values, tolerance, max_argmin, elapsed)


def optimal_bound(matrix: ProbabilityMatrix, m: int = 1, **kwargs) -> tuple[float, tuple[int, ...]]:
    """Smallest level-m bound over all orderings and one ordering attaining it."""
    orderings, values = all_level_bounds(matrix, m, **kwargs)
    best = int(np.argmin(values[:, -1]))
    return float(values[best, -1]), tuple(int(k) for k in orderings[best])


def greedy_ordering(matrix: ProbabilityMatrix) -> tuple[int, ...]:
    """Cheap ordering for a good KVHD bound.

    Starts from the pair with the largest joint probability, then appends the
    unused index with the strongest link to anything already placed.  Ties go
    to the lowest index.  No optimality guarantee.
    """
    n = matrix.n
    if n < 2:
        raise ValueError("greedy_ordering needs at least 2 events")
    p = matrix.p
    off = p.copy()
    np.fill_diagonal(off, -np.inf)
    i, j = np.unravel_index(int(np.argmax(off)), off.shape)
    order = [int(min(i, j)), int(max(i, j))]
    link = np.maximum(off[order[0]], off[order[1]])
    while len(order) < n:
        link[order] = -np.inf
        k = int(np.argmax(link))
        order.append(k)
        link = np.maximum(link, off[k])
    return tuple(order)


def greedy_bound(matrix: ProbabilityMatrix, m: int = 1) -> tuple[float, tuple[int, ...]]:
    order = greedy_ordering(matrix)
    return bound(matrix, order, m), order


def write_orderings_csv(fh, orderings: np.ndarray, values: np.ndarray) -> None:
    """One row per ordering: index, 1-based ordering, then ``B1..BL`` at 9 significant digits."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["perm_index", "ordering"] + [f"B{m + 1}" for m in range(values.shape[1])])
    for idx, (o, row) in enumerate(zip(orderings, values)):
        writer.writerow([idx, format_ordering(o)] + [f"{x:.9g}" for x in row])

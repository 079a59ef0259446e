"""Monte Carlo experiments on random second-order matrices.

All randomness is keyed by ``(seed, index)`` substreams, so results do not
depend on how trials are split across workers.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bounds import level_bounds_array, permute_stack
from .matrix import DeltaModel, conditional_uniform_draws, generate_delta
from .search import (
    DEFAULT_CAP,
    REL_TOL,
    SearchSummary,
    all_level_bounds,
    lex_permutations,
    strictly_less,
    summarize,
)

TI_PROBABILITY = Fraction(17, 108)
TI_PARTITION = {
    "i_max": Fraction(1, 12),
    "i_min": Fraction(1, 54),
    "prev_above": Fraction(1, 36),
    "prev_below": Fraction(1, 36),
}
TI_BLOCK = 1 << 16
# orderings x trials evaluated per vectorized batch
BATCH_CELLS = 1 << 17


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    std_error: float
    trials: int
    seed: int
    successes: int

    @classmethod
    def from_count(cls, successes: int, trials: int, seed: int) -> "EstimateResult":
        est = successes / trials
        return cls(est, math.sqrt(est * (1.0 - est) / trials), trials, seed, successes)

    def to_dict(self) -> dict:
        return asdict(self)


def improvement_lower_bound(n: int) -> float:
    """``1 - (1 - 17/108)^floor(n/3)``: lower bound on ``P(B_2* < B_1*)``."""
    if n < 3:
        warnings.warn(f"n={n} < 3: the bound is vacuous (0)", stacklevel=2)
    return float(1 - (1 - TI_PROBABILITY) ** (n // 3))


# -- improvement probability ----------------------------------------------------


def _trial_optima(args) -> np.ndarray:
    n, seed, draws, max_level = args
    p = conditional_uniform_draws(n, seed, draws)
    perms = lex_permutations(n)
    values = level_bounds_array(permute_stack(p, perms), max_level)
    return values.min(axis=1)


def optimal_bounds_random(
    n: int, trials: int, seed: int, max_level: int, workers: int = 1
) -> np.ndarray:
    """``(trials, max_level)`` array of optima ``B_m*`` for conditional-uniform draws."""
    batch = max(1, BATCH_CELLS // math.factorial(n))
    jobs = [
        (n, seed, list(range(start, min(start + batch, trials))), max_level)
        for start in range(0, trials, batch)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trial_optima, jobs))
    else:
        parts = [_trial_optima(job) for job in jobs]
    return np.vstack(parts)


def estimate_improvement_probability(
    n: int,
    pair: tuple[int, int] = (1, 2),
    trials: int = 1000,
    seed: int = 0,
    *,
    workers: int = 1,
    tolerance: float = REL_TOL,
    cap: int = DEFAULT_CAP,
) -> EstimateResult:
    """Fraction of random matrices whose optimal level-(m+1) bound beats level m."""
    m, m1 = pair
    if m1 != m + 1 or m < 1:
        raise ValueError(f"pair must be consecutive levels (m, m+1), got {pair}")
    if m1 > n - 1:
        raise ValueError(f"level {m1} requires n >= {m1 + 1}, got n={n}")
    if n > cap:
        raise ValueError(f"n={n} exceeds the exhaustive cap {cap}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    best = optimal_bounds_random(n, trials, seed, m1, workers)
    wins = int(strictly_less(best[:, m1 - 1], best[:, m - 1], tolerance).sum())
    return EstimateResult.from_count(wins, trials, seed)


def improvement_profile(
    n: int, trials: int, seed: int, max_level: int | None = None, workers: int = 1,
    tolerance: float = REL_TOL,
) -> list[EstimateResult]:
    """Improvement estimates for every consecutive pair ``(m, m+1)`` up to ``max_level``."""
    if max_level is None:
        max_level = n - 1
    best = optimal_bounds_random(n, trials, seed, max_level, workers)
    return [
        EstimateResult.from_count(
            int(strictly_less(best[:, m], best[:, m - 1], tolerance).sum()), trials, seed
        )
        for m in range(1, max_level)
    ]


# -- the T_i event ----------------------------------------------------------------


def _ti_counts(trials: int, seed: int) -> dict[str, int]:
    counts = dict.fromkeys(["T", *TI_PARTITION], 0)
    for block, start in enumerate(range(0, trials, TI_BLOCK)):
        size = min(TI_BLOCK, trials - start)
        u = np.random.default_rng([int(seed), block]).random((7, size))
        p2, p1, pi = u[0], u[1], u[2]  # P_{i-2}, P_{i-1}, P_i
        event = (np.minimum(p1, pi) * u[3] > p1 * u[4]) & (np.minimum(p2, pi) * u[5] > p2 * u[6])
        counts["T"] += int(event.sum())
        counts["i_max"] += int((event & (pi > p1) & (pi > p2)).sum())
        counts["i_min"] += int((event & (pi < p1) & (pi < p2)).sum())
        counts["prev_above"] += int((event & (p1 > pi) & (pi > p2)).sum())
        counts["prev_below"] += int((event & (p1 < pi) & (pi < p2)).sum())
    return counts


def estimate_Ti_probability(trials: int, seed: int = 0) -> EstimateResult:
    """Simulated probability of the event driving the asymptotic argument (17/108)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return EstimateResult.from_count(_ti_counts(trials, seed)["T"], trials, seed)


def estimate_Ti_partition(trials: int, seed: int = 0) -> dict[str, EstimateResult]:
    """Joint probabilities of the event with each ordering pattern of the three
    first-order probabilities; exact values are in :data:`TI_PARTITION`."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    counts = _ti_counts(trials, seed)
    return {k: EstimateResult.from_count(counts[k], trials, seed) for k in TI_PARTITION}


# -- correlation sweep ------------------------------------------------------------


@dataclass
class DeltaSweepRow:
    delta: float
    summaries: list[SearchSummary]
    top_beats_previous: int  # orderings with B_L < B_{L-1}
    top_beats_first: int  # orderings with B_L < B_1
    orderings: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "top_beats_previous": self.top_beats_previous,
            "top_beats_first": self.top_beats_first,
            "summaries": [s.to_dict() for s in self.summaries],
        }


def delta_sweep(
    first_order: Sequence[float],
    deltas: Sequence[float],
    max_level: int | None = None,
    tolerance: float = REL_TOL,
) -> list[DeltaSweepRow]:
    """Exhaustive search for each ``P_ij = P_i P_j + delta`` matrix."""
    rows = []
    for delta in deltas:
        matrix = generate_delta(DeltaModel(tuple(first_order), delta))
        L = matrix.n - 1 if max_level is None else max_level
        orderings, values = all_level_bounds(matrix, L)
        top = values[:, -1]
        prev = values[:, -2] if L >= 2 else top
        rows.append(DeltaSweepRow(
            delta=float(delta),
            summaries=summarize(orderings, values, tolerance),
            top_beats_previous=int(strictly_less(top, prev, tolerance).sum()),
            top_beats_first=int(strictly_less(top, values[:, 0], tolerance).sum()),
            orderings=orderings,
            values=values,
        ))
    return rows

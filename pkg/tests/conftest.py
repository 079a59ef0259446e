"""Shared fixtures and independent reference evaluators.

The evaluators here are deliberately written straight from the textbook
formulas, without sharing code with the package, so they can serve as
oracles for the vectorized engine.
"""

import itertools

import numpy as np
import pytest

from nestedbounds import datasets


def ordered_line_deduction(q, i, m):
    """Max over ordered sequences of ``min(m, i)`` distinct predecessors of line ``i`` (0-based)."""
    zero = q[i][i] * 0  # keeps Fraction inputs exact
    if i == 0:
        return zero
    t = min(m, i)
    best = zero
    for seq in itertools.permutations(range(i), t):
        total = zero
        for r, jr in enumerate(seq):
            inner = zero
            for js in seq[:r]:
                inner += min(q[jr][i], q[js][i], q[jr][js])
            total += max(q[jr][i] - inner, zero)
        best = max(best, total)
    return best


def ordered_bound(p, ordering, m):
    q = np.asarray(p)[np.ix_(ordering, ordering)]
    return sum(max(q[i, i] - ordered_line_deduction(q, i, m), 0.0) for i in range(len(q)))


def kvhd(q):
    """P_1 + P_2 - P_12 + sum_{i>=3} (P_i - max_{j<i} P_ji), identity ordering."""
    n = len(q)
    if n == 1:
        return q[0][0]
    total = q[0][0] + q[1][1] - q[0][1]
    for i in range(2, n):
        total += q[i][i] - max(q[j][i] for j in range(i))
    return total


def level2(q):
    n = len(q)
    if n == 1:
        return q[0][0]
    total = q[0][0] + q[1][1] - q[0][1]
    for i in range(2, n):
        best = max(
            q[j][i] + q[l][i] - min(q[j][i], q[l][i], q[l][j])
            for j in range(i) for l in range(j + 1, i)
        )
        total += max(q[i][i] - best, 0.0)
    return total


def random_cu(rng, n):
    P = rng.random(n)
    p = np.zeros((n, n))
    for i in range(n):
        p[i, i] = P[i]
        for j in range(i + 1, n):
            p[i, j] = p[j, i] = min(P[i], P[j]) * rng.random()
    return p


@pytest.fixture
def series4():
    return datasets.four_element_series()


@pytest.fixture
def cutsets5():
    return datasets.five_cut_sets()


@pytest.fixture
def truss7():
    return datasets.seven_member_truss()


@pytest.fixture
def random6():
    return datasets.random_six()

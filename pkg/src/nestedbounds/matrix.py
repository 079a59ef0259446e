"""Second-order probability matrices.

A :class:`ProbabilityMatrix` stores first-order probabilities ``P_i`` on the
diagonal and pairwise joint probabilities ``P_ij`` off the diagonal.  Indices
are 0-based in the Python API; the JSON/CLI layer converts to 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

FRECHET_SLACK = 1e-12


class MatrixShapeError(ValueError):
    """Raised for non-square or empty input."""


class OrderingError(ValueError):
    """Raised when an ordering is not a permutation of the index set."""


class DeltaRangeError(ValueError):
    """Raised when a correlation offset falls outside its admissible range."""

    def __init__(self, i: int, j: int, delta: float, lo: float, hi: float):
        self.pair = (i, j)
        super().__init__(
            f"delta={delta!r} outside [{lo!r}, {hi!r}] for pair ({i + 1}, {j + 1})"
        )


@dataclass(frozen=True)
class Violation:
    kind: str  # "symmetry" | "diagonal" | "frechet"
    i: int
    j: int
    value: float
    limit: float

    def describe(self) -> str:
        a, b = self.i + 1, self.j + 1
        if self.kind == "symmetry":
            return f"p[{a}][{b}]={self.value!r} != p[{b}][{a}]={self.limit!r}"
        if self.kind == "diagonal":
            return f"p[{a}][{a}]={self.value!r} outside [0, 1]"
        if self.value < 0:
            return f"p[{a}][{b}]={self.value!r} < 0"
        return f"p[{a}][{b}]={self.value!r} > min(P_{a}, P_{b})={self.limit!r}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "i": self.i + 1,
            "j": self.j + 1,
            "value": self.value,
            "limit": self.limit,
            "message": self.describe(),
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __len__(self) -> int:
        return len(self.violations)


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """Immutable symmetric matrix of first- and second-order probabilities."""

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.p, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise MatrixShapeError(f"expected a non-empty square matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @property
    def first_order(self) -> np.ndarray:
        return np.diag(self.p).copy()

    def __eq__(self, other) -> bool:
        return isinstance(other, ProbabilityMatrix) and np.array_equal(self.p, other.p)

    def __repr__(self) -> str:
        return f"ProbabilityMatrix(n={self.n})"

    @classmethod
    def from_upper(cls, rows: Sequence[Sequence[float]], scale: float = 1.0) -> "ProbabilityMatrix":
        """Build from upper-triangular rows, row ``i`` starting at the diagonal."""
        n = len(rows)
        p = np.zeros((n, n))
        for i, row in enumerate(rows):
            if len(row) != n - i:
                raise MatrixShapeError(f"row {i + 1} has {len(row)} entries, expected {n - i}")
            for k, v in enumerate(row):
                p[i, i + k] = p[i + k, i] = v
        return cls(p * scale)


def check_ordering(ordering: Iterable[int], n: int) -> tuple[int, ...]:
    """Return ``ordering`` as a tuple after checking it is a permutation of ``range(n)``."""
    sigma = tuple(int(k) for k in ordering)
    if len(sigma) != n:
        raise OrderingError(f"ordering has length {len(sigma)}, expected {n}")
    if sorted(sigma) != list(range(n)):
        raise OrderingError(f"ordering {[k + 1 for k in sigma]} is not a permutation of 1..{n}")
    return sigma


def parse_ordering(text: str) -> tuple[int, ...]:
    """Parse a 1-based ordering such as ``"4,3,2,1"`` or ``"3-1-2-4"``; returns 0-based."""
    parts = [s for s in text.replace("-", ",").split(",") if s.strip()]
    return tuple(int(s) - 1 for s in parts)


def format_ordering(ordering: Sequence[int], sep: str = "-") -> str:
    return sep.join(str(k + 1) for k in ordering)


def validate(matrix: ProbabilityMatrix | np.ndarray) -> ValidationReport:
    """List every symmetry, diagonal-range and Fréchet violation."""
    p = matrix.p if isinstance(matrix, ProbabilityMatrix) else np.asarray(matrix, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise MatrixShapeError(f"expected a square matrix, got shape {p.shape}")
    n = p.shape[0]
    out: list[Violation] = []
    for i in range(n):
        d = p[i, i]
        if not (0.0 <= d <= 1.0):
            out.append(Violation("diagonal", i, i, float(d), 1.0 if d > 1 else 0.0))
    for i in range(n):
        for j in range(i + 1, n):
            if p[i, j] != p[j, i]:
                out.append(Violation("symmetry", i, j, float(p[i, j]), float(p[j, i])))
            cap = min(p[i, i], p[j, j])
            for a, b in ((i, j), (j, i)) if p[i, j] != p[j, i] else ((i, j),):
                v = p[a, b]
                if v < -FRECHET_SLACK:
                    out.append(Violation("frechet", a, b, float(v), 0.0))
                elif v > cap + FRECHET_SLACK:
                    out.append(Violation("frechet", a, b, float(v), float(cap)))
    return ValidationReport(tuple(out))


def reorder(matrix: ProbabilityMatrix, ordering: Sequence[int]) -> ProbabilityMatrix:
    """Permute so that ``q[a][b] = p[ordering[a]][ordering[b]]``."""
    sigma = np.array(check_ordering(ordering, matrix.n))
    return ProbabilityMatrix(matrix.p[np.ix_(sigma, sigma)])


def inverse_ordering(ordering: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(ordering)
    for pos, k in enumerate(ordering):
        inv[k] = pos
    return tuple(inv)


@dataclass(frozen=True)
class DeltaModel:
    """Pairwise probabilities ``P_ij = P_i * P_j + delta``."""

    first_order: tuple[float, ...]
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "first_order", tuple(float(x) for x in self.first_order))

    def delta_range(self, i: int, j: int) -> tuple[float, float]:
        pi, pj = self.first_order[i], self.first_order[j]
        return -pi * pj, min(pi, pj) - pi * pj

    def check(self) -> None:
        n = len(self.first_order)
        for i in range(n):
            for j in range(i + 1, n):
                lo, hi = self.delta_range(i, j)
                if not (lo - FRECHET_SLACK <= self.delta <= hi + FRECHET_SLACK):
                    raise DeltaRangeError(i, j, self.delta, lo, hi)


def generate_delta(model: DeltaModel) -> ProbabilityMatrix:
    if not model.first_order:
        raise MatrixShapeError("first_order must be non-empty")
    if any(not 0.0 <= x <= 1.0 for x in model.first_order):
        raise ValueError("first-order probabilities must lie in [0, 1]")
    model.check()
    P = np.array(model.first_order)
    p = np.outer(P, P) + model.delta
    np.fill_diagonal(p, P)
    return ProbabilityMatrix(p)


def _rng(seed, draw: int | None) -> np.random.Generator:
    if draw is None:
        return np.random.default_rng(seed)
    return np.random.default_rng([int(seed), int(draw)])


def assemble_conditional_uniform(diag: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Assemble matrices from diagonal draws ``(..., n)`` and upper-triangle draws
    ``(..., n(n-1)/2)`` in row-major order: ``P_ij = min(P_i, P_j) * U_ij``."""
    diag = np.asarray(diag, dtype=float)
    n = diag.shape[-1]
    iu = np.triu_indices(n, 1)
    p = np.zeros(diag.shape[:-1] + (n, n))
    p[..., iu[0], iu[1]] = np.minimum(diag[..., iu[0]], diag[..., iu[1]]) * upper
    p = p + np.swapaxes(p, -1, -2)
    idx = np.arange(n)
    p[..., idx, idx] = diag
    return p


def conditional_uniform_draws(n: int, seed: int, draws: Sequence[int]) -> np.ndarray:
    """Stack of matrices, draw ``k`` using the substream ``(seed, k)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = n * (n - 1) // 2
    raw = np.empty((len(draws), n + m))
    for row, k in enumerate(draws):
        raw[row] = _rng(seed, k).random(n + m)
    return assemble_conditional_uniform(raw[:, :n], raw[:, n:])


def generate_conditional_uniform(n: int, seed: int, draw: int | None = 0) -> ProbabilityMatrix:
    """Random matrix with ``P_i ~ U[0,1]`` and ``P_ij = min(P_i, P_j) U_ij``.

    The substream is keyed by ``(seed, draw)`` so that draw ``k`` of an
    experiment can be regenerated on its own.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if draw is None:
        m = n * (n - 1) // 2
        raw = _rng(seed, None).random(n + m)
        return ProbabilityMatrix(assemble_conditional_uniform(raw[:n], raw[n:]))
    return ProbabilityMatrix(conditional_uniform_draws(n, seed, [draw])[0])


# -- JSON ---------------------------------------------------------------------


def matrix_from_dict(doc: dict) -> ProbabilityMatrix:
    if "matrix" not in doc:
        raise ValueError("matrix document has no 'matrix' field")
    arr = np.asarray(doc["matrix"], dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixShapeError(f"'matrix' must be square, got shape {arr.shape}")
    if "n" in doc and int(doc["n"]) != arr.shape[0]:
        raise MatrixShapeError(f"n={doc['n']} does not match matrix size {arr.shape[0]}")
    return ProbabilityMatrix(arr * float(doc.get("scale", 1.0)))


def matrix_to_dict(matrix: ProbabilityMatrix) -> dict:
    return {"n": matrix.n, "matrix": matrix.p.tolist(), "scale": 1.0}


def load_matrix(path: str | Path) -> ProbabilityMatrix:
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))


def save_matrix(matrix: ProbabilityMatrix, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_dict(matrix), fh, indent=2)
        fh.write("\n")

"""Seeded sampling of coupling matrices with prescribed low-order moments.

All entry laws are centered with unit variance; the third and fourth moments
(w3, w4) are carried along explicitly because they enter the fluctuation
constants of the free energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import DimensionError, ParameterError

KINDS = ("gaussian", "rademacher", "uniform")

_UNIFORM_HALF_WIDTH = math.sqrt(3.0)


@dataclass(frozen=True)
class DisorderSpec:
    """Entry distribution with its exact analytic third and fourth moments."""

    kind: str
    w3: float
    w4: float


@dataclass(frozen=True, eq=False)
class DisorderMatrix:
    """Dense coupling matrix in canonical orientation (rows >= cols).

    `swapped` records whether the requested shape was transposed to reach
    the canonical orientation; `original_shape()` round-trips it.
    """

    rows: int
    cols: int
    entries: np.ndarray
    seed: int
    swapped: bool = False

    def original_shape(self) -> tuple[int, int]:
        return (self.cols, self.rows) if self.swapped else (self.rows, self.cols)


def make_distribution(kind: str) -> DisorderSpec:
    """Return the spec for a supported entry law.

    gaussian: N(0,1); rademacher: uniform on {-1,+1}; uniform: U[-sqrt(3), sqrt(3)].
    The fourth moments 3, 1 and 9/5 bracket the Gaussian value from both sides.
    """
    if kind == "gaussian":
        return DisorderSpec(kind, w3=0.0, w4=3.0)
    if kind == "rademacher":
        return DisorderSpec(kind, w3=0.0, w4=1.0)
    if kind == "uniform":
        return DisorderSpec(kind, w3=0.0, w4=9.0 / 5.0)
    raise ParameterError(f"unsupported disorder kind: {kind!r} (expected one of {KINDS})")


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream index).

    Philox is a counter-based PRNG, so distinct (seed, stream) pairs give
    statistically independent streams and results never depend on how work
    is scheduled across streams.
    """
    key = np.array([np.uint64(seed), np.uint64(stream)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_disorder(
    spec: DisorderSpec, n1: int, n2: int, seed: int, trial: int = 0
) -> DisorderMatrix:
    """Sample an n1 x n2 matrix of iid entries from the given law.

    Entries are drawn row-major from the (seed, trial) stream, then the
    matrix is transposed if needed so that rows >= cols. Identical arguments
    give bit-identical matrices.
    """
    if n1 < 1 or n2 < 1:
        raise DimensionError(f"matrix dimensions must be positive, got {n1}x{n2}")
    rng = stream_rng(seed, trial)
    if spec.kind == "gaussian":
        entries = rng.standard_normal((n1, n2))
    elif spec.kind == "rademacher":
        entries = rng.integers(0, 2, size=(n1, n2)).astype(np.float64) * 2.0 - 1.0
    elif spec.kind == "uniform":
        entries = rng.uniform(-_UNIFORM_HALF_WIDTH, _UNIFORM_HALF_WIDTH, size=(n1, n2))
    else:
        raise ParameterError(f"unsupported disorder kind: {spec.kind!r}")
    swapped = n1 < n2
    if swapped:
        entries = np.ascontiguousarray(entries.T)
    entries.setflags(write=False)
    return DisorderMatrix(
        rows=max(n1, n2), cols=min(n1, n2), entries=entries, seed=seed, swapped=swapped
    )


def scale_rows(matrix: DisorderMatrix, weights: np.ndarray) -> DisorderMatrix:
    """Diagonal population-covariance hook: row i is multiplied by weights[i].

    No limiting analytics are provided for the scaled ensemble; this exists
    only so externally supplied covariance profiles can be sampled.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (matrix.rows,):
        raise DimensionError(
            f"expected {matrix.rows} row weights, got shape {weights.shape}"
        )
    entries = matrix.entries * weights[:, None]
    entries.setflags(write=False)
    return DisorderMatrix(
        rows=matrix.rows,
        cols=matrix.cols,
        entries=entries,
        seed=matrix.seed,
        swapped=matrix.swapped,
    )


def dump_csv(matrix: DisorderMatrix, fh: IO[str]) -> None:
    """Write the matrix as CSV, one line per row, 17 significant digits."""
    for row in matrix.entries:
        fh.write(",".join(f"{x:.17g}" for x in row))
        fh.write("\n")

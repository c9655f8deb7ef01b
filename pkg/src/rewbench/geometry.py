"""Uniform discretization of a bounded decision set into indexed sub-cubes.

A bounded set K inside an axis-aligned cube of edge D is covered by a grid
of 2^m sub-cubes per axis.  Every sub-cube that detectably meets K gets a
fixed in-set representative point; online algorithms then play on the finite
index grid while costs are incurred at the representatives.  Costs measured
at representatives satisfy a grid Lipschitz bound with constant
2*sqrt(n)*D*L / 2^m (one-norm in index units).
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyDecisionSet,
    IndexOutOfRange,
    MissingCost,
    NotInIndexSet,
)

PointIndex = tuple[int, ...]
MembershipOracle = Callable[[np.ndarray], bool]

#: rejection-sampling budget per sub-cube whose center lies outside the set
REPRESENTATIVE_BUDGET = 1000

# pairwise Lipschitz validation is exhaustive up to this many points, sampled above
_FULL_PAIR_LIMIT = 10_000
_SAMPLED_PAIRS = 1_000_000
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class BoundingCube:
    """Axis-aligned cube, `[origin_j, origin_j + edge_length]` per coordinate."""

    origin: tuple[float, ...]
    edge_length: float

    def __post_init__(self) -> None:
        origin = tuple(float(v) for v in self.origin)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "edge_length", float(self.edge_length))
        if len(origin) == 0:
            raise ValueError("cube needs at least one dimension")
        if not all(math.isfinite(v) for v in origin):
            raise ValueError("cube origin must be finite")
        if not (math.isfinite(self.edge_length) and self.edge_length > 0):
            raise ValueError("edge_length must be positive and finite")

    @property
    def dimension(self) -> int:
        return len(self.origin)

    @property
    def upper(self) -> tuple[float, ...]:
        return tuple(v + self.edge_length for v in self.origin)


class DiscretizedDomain:
    """A built grid: index set, representatives, and the grid Lipschitz constant.

    Immutable after construction; safe to share across threads.  Instances are
    created by :func:`build_domain`.
    """

    def __init__(
        self,
        cube: BoundingCube,
        m: int,
        oracle: MembershipOracle,
        lipschitz: float,
        index_set: list[PointIndex],
        representatives: dict[PointIndex, np.ndarray],
        seed: int,
    ):
        self.cube = cube
        self.m = int(m)
        self.oracle = oracle
        self.lipschitz_L = float(lipschitz)
        self.seed = int(seed)
        self.index_set = list(index_set)
        self.representatives = representatives
        self.cell_edge = cube.edge_length / (1 << self.m)
        n = cube.dimension
        self.discrete_lipschitz = 2.0 * math.sqrt(n) * cube.edge_length * self.lipschitz_L / (1 << self.m)
        self._position = {idx: pos for pos, idx in enumerate(self.index_set)}
        self._coords = np.asarray(self.index_set, dtype=np.int64).reshape(len(self.index_set), n)
        self._coords.setflags(write=False)
        reps = np.stack([representatives[idx] for idx in self.index_set])
        reps.setflags(write=False)
        self._reps = reps

    @property
    def dimension(self) -> int:
        return self.cube.dimension

    @property
    def size(self) -> int:
        return len(self.index_set)

    @property
    def coords_matrix(self) -> np.ndarray:
        """Index tuples as a read-only (size, n) int array, lexicographic rows."""
        return self._coords

    @property
    def representatives_matrix(self) -> np.ndarray:
        """Representative points as a read-only (size, n) array aligned with index order."""
        return self._reps

    def contains_index(self, index: PointIndex) -> bool:
        return tuple(index) in self._position

    def position(self, index: PointIndex) -> int:
        """Row of `index` in the lexicographic index order."""
        try:
            return self._position[tuple(index)]
        except KeyError:
            raise NotInIndexSet(f"sub-cube {index!r} does not overlap the decision set") from None

    def _check_coords(self, index: PointIndex) -> PointIndex:
        index = tuple(index)
        top = 1 << self.m
        if len(index) != self.dimension:
            raise IndexOutOfRange(f"index {index!r} has wrong dimension (expected {self.dimension})")
        for c in index:
            if not isinstance(c, (int, np.integer)) or not 1 <= c <= top:
                raise IndexOutOfRange(f"coordinate {c!r} outside [1, {top}] in index {index!r}")
        return index

    def subcube_bounds(self, index: PointIndex) -> tuple[np.ndarray, np.ndarray]:
        """Closed lower/upper corners of the sub-cube at `index`."""
        index = self._check_coords(index)
        origin = np.asarray(self.cube.origin)
        idx = np.asarray(index, dtype=float)
        lower = origin + (idx - 1.0) * self.cell_edge
        upper = origin + idx * self.cell_edge
        return lower, upper

    def representative(self, index: PointIndex) -> np.ndarray:
        """The stored in-set point played for `index`; stable across calls."""
        index = self._check_coords(index)
        return self._reps[self.position(index)]

    def validate_discrete_lipschitz(self, costs: Mapping[PointIndex, float]) -> bool:
        """Check |c(p) - c(q)| <= L_d * ||p - q||_1 over index pairs.

        Exhaustive for up to 10^4 points; beyond that a fixed-seed sample of
        10^6 pairs is checked instead.  Tolerance 1e-9 * max(1, L_d).
        """
        values = np.empty(self.size)
        for pos, idx in enumerate(self.index_set):
            try:
                values[pos] = costs[idx]
            except KeyError:
                raise MissingCost(idx) from None
        ld = self.discrete_lipschitz
        tol = 1e-9 * max(1.0, ld)
        coords = self._coords
        if self.size <= _FULL_PAIR_LIMIT:
            block = max(1, (1 << 22) // max(self.size, 1))
            for lo in range(0, self.size, block):
                rows = slice(lo, min(lo + block, self.size))
                gaps = np.abs(values[rows, None] - values[None, :])
                dist = np.abs(coords[rows, None, :] - coords[None, :, :]).sum(axis=2)
                if np.any(gaps > ld * dist + tol):
                    return False
            return True
        rng = np.random.default_rng(0x9E3779B9)
        pairs = rng.integers(0, self.size, size=(_SAMPLED_PAIRS, 2))
        gaps = np.abs(values[pairs[:, 0]] - values[pairs[:, 1]])
        dist = np.abs(coords[pairs[:, 0]] - coords[pairs[:, 1]]).sum(axis=1)
        return not np.any(gaps > ld * dist + tol)


def _cell_rng(seed: int, cell: int) -> np.random.Generator:
    # per-cell stream so parallel scans stay reproducible
    return np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, cell]))


def _find_representative(
    oracle: MembershipOracle,
    lower: np.ndarray,
    edge: float,
    seed: int,
    cell: int,
) -> np.ndarray | None:
    center = lower + 0.5 * edge
    if oracle(center):
        return center
    rng = _cell_rng(seed, cell)
    draws = lower + rng.random((REPRESENTATIVE_BUDGET, lower.size)) * edge
    for row in draws:
        if oracle(row):
            return row
    return None


def build_domain(
    cube: BoundingCube,
    m: int,
    oracle: MembershipOracle,
    lipschitz: float,
    seed: int = 0,
) -> DiscretizedDomain:
    """Enumerate all 2^(m*n) sub-cubes and keep those with an in-set point.

    A sub-cube's representative is its center when the oracle accepts it,
    otherwise the first of up to ``REPRESENTATIVE_BUDGET`` uniform draws the
    oracle accepts.  Sub-cubes where the search fails are treated as not
    overlapping the set, so very thin intersections can be missed.
    Deterministic for a fixed seed.
    """
    if m < 0:
        raise ValueError("granularity m must be non-negative")
    if lipschitz < 0:
        raise ValueError("Lipschitz constant must be non-negative")
    n = cube.dimension
    per_axis = 1 << m
    edge = cube.edge_length / per_axis
    origin = np.asarray(cube.origin)
    index_set: list[PointIndex] = []
    representatives: dict[PointIndex, np.ndarray] = {}
    for cell, coords in enumerate(itertools.product(range(1, per_axis + 1), repeat=n)):
        lower = origin + (np.asarray(coords, dtype=float) - 1.0) * edge
        rep = _find_representative(oracle, lower, edge, seed, cell)
        if rep is None:
            continue
        rep = np.asarray(rep, dtype=float)
        rep.setflags(write=False)
        index_set.append(coords)
        representatives[coords] = rep
    if not index_set:
        raise EmptyDecisionSet("no sub-cube contains a detectable point of the decision set")
    return DiscretizedDomain(cube, m, oracle, lipschitz, index_set, representatives, seed)

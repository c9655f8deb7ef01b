"""Recursive exponential weighting over a layered index partition.

Each round, selection walks the sampling tree from the root: at every node
the next block is drawn with probability proportional to
exp(-eta_t * C_block), where C_block is the block's cumulative normalized
cost and eta_t = 1/sqrt(t).  Once the round's full cost vector is revealed,
every block accumulates the conditional expectation, under the very
distribution the round was played with, of

    (cost - min over the parent block) / (parent one-norm diameter * L_d),

a quantity in [0, 1] whenever the costs respect the grid Lipschitz bound.
The accumulation runs as a single bottom-up pass combining each node's
children's (probability, expectation, minimum) triples, which matches the
per-point product form exactly.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    BottomLayer,
    CostExceedsCeiling,
    InvalidRound,
    MissingCost,
    NormalizationOutOfRange,
    NotInIndexSet,
    NumericalError,
    PointNotInDomain,
)
from .geometry import DiscretizedDomain, PointIndex
from .partition import LayerTree, SubsetId

#: normalized costs may exceed [0, 1] by at most this much before erroring
RANGE_TOL = 1e-9


def eta(t: int) -> float:
    """Step size 1/sqrt(t) for 1-based round t."""
    if t < 1:
        raise InvalidRound(f"round index must be >= 1, got {t}")
    return 1.0 / math.sqrt(t)


class CostSample(Mapping):
    """One round of revealed costs, aligned with the domain's index order."""

    __slots__ = ("domain", "array")

    def __init__(self, domain: DiscretizedDomain, values, ceiling: float | None = None):
        arr = np.array(values, dtype=float)
        if arr.shape != (domain.size,):
            raise ValueError(f"expected {domain.size} cost values, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NumericalError("cost sample contains non-finite values")
        if ceiling is not None:
            if arr.max() > ceiling + 1e-12 or arr.min() < -1e-12:
                raise CostExceedsCeiling(
                    f"costs must lie in [0, {ceiling}], saw [{arr.min()}, {arr.max()}]"
                )
        arr.setflags(write=False)
        self.domain = domain
        self.array = arr

    @classmethod
    def from_mapping(cls, domain: DiscretizedDomain, costs, ceiling: float | None = None):
        values = np.empty(domain.size)
        for pos, idx in enumerate(domain.index_set):
            try:
                values[pos] = costs[idx]
            except KeyError:
                raise MissingCost(idx) from None
        return cls(domain, values, ceiling)

    def __getitem__(self, point: PointIndex) -> float:
        return float(self.array[self.domain.position(point)])

    def __iter__(self):
        return iter(self.domain.index_set)

    def __len__(self) -> int:
        return self.domain.size


class SubsetValues(Mapping):
    """Read-only mapping view of one float per non-empty subset (layers 1..m)."""

    __slots__ = ("_tree", "_array")

    def __init__(self, tree: LayerTree, array: np.ndarray):
        self._tree = tree
        self._array = array

    def __getitem__(self, subset: SubsetId) -> float:
        node = self._tree.node_of(subset)
        if node == 0:
            raise KeyError(subset)
        return float(self._array[node])

    def __iter__(self):
        for node in range(1, self._tree.node_count):
            yield self._tree.subset_at(node)

    def __len__(self) -> int:
        return self._tree.node_count - 1

    def as_array(self) -> np.ndarray:
        """Raw per-node values; slot 0 is the root and is always 0."""
        return self._array


@dataclass(frozen=True, eq=False)
class SelectionPath:
    """One round's descent: chosen blocks per layer, the point, its representative."""

    subsets: tuple[SubsetId, ...]
    point: PointIndex
    decision: np.ndarray = field(repr=False)


class RewState:
    """Mutable engine state: cumulative normalized costs plus a round counter.

    One logical stream per instance; independent instances may share the
    (immutable) tree.  `select` never mutates, `update` advances the round.
    """

    def __init__(self, tree: LayerTree, backend: str | None = None):
        self.tree = tree
        self.round = 0
        self.totals = np.zeros(tree.node_count)
        self.backend = kernels.resolve_name(backend)
        self._kernel = kernels.load(self.backend)
        ld = tree.domain.discrete_lipschitz
        self._denoms = None
        if ld > 0.0 and tree.node_count > 1:
            denoms = tree.norm_units * ld
            denoms[0] = 1.0  # root slot, never read
            self._denoms = denoms
        self._cache_round = -1
        self._cache: np.ndarray | None = None

    @property
    def cum_norm_cost(self) -> SubsetValues:
        return SubsetValues(self.tree, self.totals)

    def _probs(self, t: int) -> np.ndarray:
        if t != self.round + 1:
            raise InvalidRound(
                f"round {t} out of step: state has completed {self.round} updates"
            )
        if self._cache_round != self.round:
            if self.tree.node_count == 1:
                probs = np.ones(1)
            else:
                probs = self._kernel.child_probabilities(
                    self.totals,
                    eta(t),
                    self.tree.child_ptr,
                    self.tree.child_idx,
                    self.tree.leaf_start,
                )
            self._cache = probs
            self._cache_round = self.round
        return self._cache

    def child_distribution(self, t: int, subset: SubsetId) -> list[tuple[SubsetId, float]]:
        """Sampling distribution over `subset`'s children for round t.

        Order matches ``children_of``; entries sum to 1 up to float rounding.
        """
        tree = self.tree
        node = tree.node_of(subset)
        if subset.layer >= tree.m:
            raise BottomLayer(f"{subset!r} is a bottom-layer singleton")
        probs = self._probs(t)
        lo, hi = tree.child_ptr[node], tree.child_ptr[node + 1]
        return [(tree.subset_at(int(c)), float(probs[c])) for c in tree.child_idx[lo:hi]]

    def select(self, rng: np.random.Generator) -> SelectionPath:
        """Sample one decision for round `self.round + 1` without mutating state."""
        tree = self.tree
        t = self.round + 1
        probs = self._probs(t)
        if tree.m == 0:
            point = tree.point_at(0)
            return SelectionPath((), point, tree.domain.representative(point))
        draws = rng.random(tree.m)
        nodes = self._kernel.descend(probs, tree.child_ptr, tree.child_idx, draws)
        subsets = tuple(tree.subset_at(int(v)) for v in nodes)
        point = tree.point_at(int(nodes[-1]) - tree.leaf_start)
        return SelectionPath(subsets, point, tree.domain.representative(point))

    def point_probability(
        self, t: int, point: PointIndex, given: SubsetId | None = None
    ) -> float:
        """Probability that round t's descent ends at `point`.

        With `given`, the probability is conditional on the descent passing
        through that block (0 when the block does not contain the point; 1
        when the block is the point's own bottom-layer singleton).
        """
        probs = self._probs(t)
        tree = self.tree
        try:
            pos = tree.domain.position(tuple(point))
        except NotInIndexSet:
            raise PointNotInDomain(f"point {tuple(point)!r} is not in the index set") from None
        stop = 0 if given is None else tree.node_of(given)
        node = tree.leaf_start + pos
        acc = 1.0
        while node != stop:
            if node == 0:
                return 0.0  # conditioning block does not contain the point
            acc *= float(probs[node])
            node = int(tree.parent[node])
        return acc

    def update(self, costs) -> SubsetValues:
        """Reveal the round's costs and accumulate every block's normalized cost.

        Uses the same child distributions the round was played with (built
        from the cumulative costs before this call).  Returns the per-block
        normalized costs for inspection.  Raises NormalizationOutOfRange when
        a value leaves [0, 1] by more than ``RANGE_TOL``, which indicates the
        stream violates its declared Lipschitz constant; values within the
        tolerance are clamped.
        """
        tree = self.tree
        sample = costs if isinstance(costs, CostSample) else CostSample.from_mapping(tree.domain, costs)
        if sample.domain is not tree.domain:
            raise ValueError("cost sample was built for a different domain")
        t = self.round + 1
        probs = self._probs(t)
        if tree.node_count == 1 or self._denoms is None:
            # L_d = 0 means the cost family is flat on the grid; nothing to learn
            cbar = np.zeros(tree.node_count)
        else:
            cbar, bad = self._kernel.round_normalized_costs(
                probs,
                sample.array,
                tree.child_ptr,
                tree.child_idx,
                tree.parent,
                self._denoms,
                tree.layer_ptr,
                RANGE_TOL,
            )
            if bad >= 0:
                raise NormalizationOutOfRange(tree.subset_at(int(bad)))
        self.totals += cbar
        self.round += 1
        self._cache_round = -1
        self._cache = None
        return SubsetValues(tree, cbar)


def new_state(tree: LayerTree, backend: str | None = None) -> RewState:
    """Fresh engine state: round 0, all cumulative normalized costs at 0."""
    return RewState(tree, backend)

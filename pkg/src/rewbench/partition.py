"""Layered partition of the discretized index grid.

Layer l groups the grid into blocks of 2^(m-l) consecutive indices per axis:
layer 0 is the whole index set, layer m is single points.  Only blocks that
contain at least one grid point are materialized, and the nesting of those
non-empty blocks forms the sampling tree walked by the weighting engine.

Nodes are numbered root first, then layer by layer with each layer's blocks
in lexicographic coordinate order; children of a node are listed in CSR form
(`child_ptr`, `child_idx`).  Bottom-layer nodes align one-to-one with the
domain's point order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BottomLayer, NotInIndexSet, PointNotInDomain, RootHasNoParent
from .geometry import DiscretizedDomain, PointIndex


@dataclass(frozen=True, order=True)
class SubsetId:
    """A block of the layer-`layer` partition, coordinates in [1, 2^layer]^n."""

    layer: int
    coords: tuple[int, ...]


class LayerTree:
    """Navigable layered partition over a discretized domain.

    Immutable after construction; build with :func:`build_tree`.
    """

    def __init__(self, domain: DiscretizedDomain):
        self.domain = domain
        self.m = domain.m
        self.n = domain.dimension
        pts = domain.coords_matrix
        count = pts.shape[0]

        subsets: list[SubsetId] = [SubsetId(0, (1,) * self.n)]
        member_rows: list[np.ndarray] = [np.arange(count, dtype=np.int64)]
        layer_ptr = [0, 1]
        for layer in range(1, self.m + 1):
            shift = self.m - layer
            block = ((pts - 1) >> shift) + 1
            groups: dict[tuple[int, ...], list[int]] = {}
            for row in range(count):
                groups.setdefault(tuple(int(v) for v in block[row]), []).append(row)
            for coords in sorted(groups):
                subsets.append(SubsetId(layer, coords))
                member_rows.append(np.asarray(groups[coords], dtype=np.int64))
            layer_ptr.append(len(subsets))

        total = len(subsets)
        self._subsets = subsets
        self._member_rows = member_rows
        self._node = {s: i for i, s in enumerate(subsets)}
        self.node_count = total
        self.layer_ptr = np.asarray(layer_ptr, dtype=np.int64)
        self.leaf_start = int(self.layer_ptr[-2])

        parent = np.zeros(total, dtype=np.int64)
        kid_lists: list[list[int]] = [[] for _ in range(total)]
        for node in range(1, total):
            s = subsets[node]
            up = SubsetId(s.layer - 1, tuple(((c - 1) >> 1) + 1 for c in s.coords))
            parent[node] = self._node[up]
            kid_lists[parent[node]].append(node)
        child_ptr = np.zeros(total + 1, dtype=np.int64)
        np.cumsum([len(k) for k in kid_lists], out=child_ptr[1:])
        child_idx = np.fromiter(
            (c for kids in kid_lists for c in kids), dtype=np.int64, count=total - 1
        )
        parent.setflags(write=False)
        child_ptr.setflags(write=False)
        child_idx.setflags(write=False)
        self.parent = parent
        self.child_ptr = child_ptr
        self.child_idx = child_idx

        # one-norm diameter (index units) of each node's parent block; this is the
        # normalizer scale used for the node's normalized costs
        norm_units = np.zeros(total)
        layers = np.repeat(
            np.arange(self.m + 1, dtype=np.int64), np.diff(self.layer_ptr)
        )
        norm_units[1:] = self.n * np.exp2(self.m - layers[1:] + 1)
        norm_units.setflags(write=False)
        self.norm_units = norm_units

    # -- navigation -------------------------------------------------------

    def node_of(self, subset: SubsetId) -> int:
        try:
            return self._node[subset]
        except KeyError:
            raise KeyError(f"unknown or empty subset {subset!r}") from None

    def subset_at(self, node: int) -> SubsetId:
        return self._subsets[node]

    def point_at(self, row: int) -> PointIndex:
        return self.domain.index_set[row]

    def nonempty_subsets(self, layer: int) -> list[SubsetId]:
        """Non-empty blocks of one layer, lexicographic order."""
        if not 0 <= layer <= self.m:
            raise ValueError(f"layer {layer} outside [0, {self.m}]")
        return self._subsets[self.layer_ptr[layer] : self.layer_ptr[layer + 1]]

    def candidate_count(self, layer: int) -> int:
        """Number of layer blocks before emptiness filtering: 2^(n*layer)."""
        return 1 << (self.n * layer)

    def members(self, subset: SubsetId) -> list[PointIndex]:
        """Grid points inside a block, lexicographic order."""
        rows = self._member_rows[self.node_of(subset)]
        return [self.domain.index_set[r] for r in rows]

    def member_rows(self, subset: SubsetId) -> np.ndarray:
        return self._member_rows[self.node_of(subset)]

    def subset_of_point(self, layer: int, point: PointIndex) -> SubsetId:
        """The unique layer-`layer` block containing `point` (closed form)."""
        if not 0 <= layer <= self.m:
            raise ValueError(f"layer {layer} outside [0, {self.m}]")
        point = tuple(point)
        try:
            self.domain.position(point)
        except NotInIndexSet:
            raise PointNotInDomain(f"point {point!r} is not in the index set") from None
        shift = self.m - layer
        return SubsetId(layer, tuple(((c - 1) >> shift) + 1 for c in point))

    def children_of(self, subset: SubsetId) -> list[SubsetId]:
        """Non-empty blocks of the next layer inside `subset`, lexicographic."""
        node = self.node_of(subset)
        if subset.layer >= self.m:
            raise BottomLayer(f"{subset!r} is a bottom-layer singleton")
        lo, hi = self.child_ptr[node], self.child_ptr[node + 1]
        return [self._subsets[c] for c in self.child_idx[lo:hi]]

    def parent_point_set(self, subset: SubsetId) -> list[PointIndex]:
        """Points of the block one layer up that contains `subset`.

        This is the reference set whose per-round minimum anchors the
        subset's normalized cost; for a layer-1 block it is the whole
        index set.
        """
        node = self.node_of(subset)
        if subset.layer == 0:
            raise RootHasNoParent("the layer-0 block is the whole index set")
        rows = self._member_rows[self.parent[node]]
        return [self.domain.index_set[r] for r in rows]

    def one_norm_diameter(self, subset: SubsetId) -> int:
        """Upper bound n * 2^(m - layer) on one-norm gaps inside the block."""
        self.node_of(subset)
        return self.n * (1 << (self.m - subset.layer))


def build_tree(domain: DiscretizedDomain) -> LayerTree:
    """Materialize the non-empty blocks of every layer over `domain`."""
    return LayerTree(domain)

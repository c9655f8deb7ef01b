"""Pure numpy implementation of the sampling-tree kernels.

Mirrors the compiled extension operation for operation; per-node summation
order is the same in both backends, so they agree to float rounding.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def child_probabilities(cum, eta, child_ptr, child_idx, leaf_start):
    """Per-node probability of being picked from its parent.

    Softmax of -eta * cum over each internal node's children, shifted by the
    sibling minimum before exponentiation so weights never underflow to an
    all-zero row.  Slot 0 (the root) is fixed at 1.
    """
    probs = np.empty(cum.shape[0])
    probs[0] = 1.0
    starts = child_ptr[:leaf_start]
    counts = np.diff(child_ptr[: leaf_start + 1])
    vals = cum[child_idx]
    mins = np.minimum.reduceat(vals, starts)
    weights = np.exp(-eta * (vals - np.repeat(mins, counts)))
    totals = np.add.reduceat(weights, starts)
    probs[child_idx] = weights / np.repeat(totals, counts)
    return probs


def round_normalized_costs(probs, leaf_costs, child_ptr, child_idx, parent, denom, layer_ptr, tol):
    """One bottom-up pass: per-node expected cost, block minimum, normalized cost.

    Returns (cbar, bad) where cbar[s] = (E[cost | s] - min over s's parent
    block) / denom[s], clamped to [0, 1], and bad is the lowest node id whose
    raw value fell outside [-tol, 1 + tol] (-1 when none did).
    """
    total = probs.shape[0]
    depth = layer_ptr.shape[0] - 2
    leaf_start = int(layer_ptr[depth])
    exp_cost = np.empty(total)
    min_cost = np.empty(total)
    exp_cost[leaf_start:] = leaf_costs
    min_cost[leaf_start:] = leaf_costs
    for layer in range(depth - 1, -1, -1):
        u0, u1 = int(layer_ptr[layer]), int(layer_ptr[layer + 1])
        e0 = int(child_ptr[u0])
        rows = child_idx[e0 : int(child_ptr[u1])]
        starts = child_ptr[u0:u1] - e0
        exp_cost[u0:u1] = np.add.reduceat(probs[rows] * exp_cost[rows], starts)
        min_cost[u0:u1] = np.minimum.reduceat(min_cost[rows], starts)
    raw = (exp_cost[1:] - min_cost[parent[1:]]) / denom[1:]
    bad = -1
    outside = (raw < -tol) | (raw > 1.0 + tol)
    if outside.any():
        bad = int(np.argmax(outside)) + 1
    cbar = np.zeros(total)
    np.clip(raw, 0.0, 1.0, out=cbar[1:])
    return cbar, bad


def descend(probs, child_ptr, child_idx, uniforms):
    """Walk root to leaf, one inverse-CDF draw per layer.

    Strict prefix sums; the last child absorbs any residual float mass.
    """
    depth = uniforms.shape[0]
    path = np.empty(depth, dtype=np.int64)
    node = 0
    for d in range(depth):
        kids = child_idx[child_ptr[node] : child_ptr[node + 1]]
        cdf = np.cumsum(probs[kids])
        j = int(np.searchsorted(cdf, uniforms[d], side="right"))
        if j >= kids.shape[0]:
            j = kids.shape[0] - 1
        node = int(kids[j])
        path[d] = node
    return path


def subtree_probabilities(probs, parent, layer_ptr):
    """Unconditional probability of reaching each node from the root."""
    mass = np.empty(probs.shape[0])
    mass[0] = 1.0
    for layer in range(1, layer_ptr.shape[0] - 1):
        a, b = int(layer_ptr[layer]), int(layer_ptr[layer + 1])
        mass[a:b] = mass[parent[a:b]] * probs[a:b]
    return mass

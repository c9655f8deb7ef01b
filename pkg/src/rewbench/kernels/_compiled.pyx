# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sampling-tree kernels; same operation set as kernels.reference."""

from libc.math cimport exp

import numpy as np

NAME = "compiled"


def child_probabilities(const double[::1] cum, double eta, const long long[::1] child_ptr,
                        const long long[::1] child_idx, Py_ssize_t leaf_start):
    out_arr = np.empty(cum.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t u, j, s, e
    cdef long long c
    cdef double mn, v, w, z
    out[0] = 1.0
    for u in range(leaf_start):
        s = child_ptr[u]
        e = child_ptr[u + 1]
        mn = cum[child_idx[s]]
        for j in range(s + 1, e):
            v = cum[child_idx[j]]
            if v < mn:
                mn = v
        z = 0.0
        for j in range(s, e):
            c = child_idx[j]
            w = exp(-eta * (cum[c] - mn))
            out[c] = w
            z += w
        for j in range(s, e):
            out[child_idx[j]] /= z
    return out_arr


def round_normalized_costs(const double[::1] probs, const double[::1] leaf_costs,
                           const long long[::1] child_ptr, const long long[::1] child_idx,
                           const long long[::1] parent, const double[::1] denom,
                           const long long[::1] layer_ptr, double tol):
    cdef Py_ssize_t total = probs.shape[0]
    cdef Py_ssize_t leaf_start = layer_ptr[layer_ptr.shape[0] - 2]
    exp_arr = np.empty(total)
    min_arr = np.empty(total)
    cbar_arr = np.zeros(total)
    cdef double[::1] exp_cost = exp_arr
    cdef double[::1] min_cost = min_arr
    cdef double[::1] cbar = cbar_arr
    cdef Py_ssize_t u, j, s, e, v
    cdef long long c
    cdef double acc, mn, x
    cdef long long bad = -1
    for j in range(leaf_start, total):
        exp_cost[j] = leaf_costs[j - leaf_start]
        min_cost[j] = leaf_costs[j - leaf_start]
    for u in range(leaf_start - 1, -1, -1):
        s = child_ptr[u]
        e = child_ptr[u + 1]
        c = child_idx[s]
        acc = 0.0
        mn = min_cost[c]
        for j in range(s, e):
            c = child_idx[j]
            acc += probs[c] * exp_cost[c]
            if min_cost[c] < mn:
                mn = min_cost[c]
        exp_cost[u] = acc
        min_cost[u] = mn
    for v in range(1, total):
        x = (exp_cost[v] - min_cost[parent[v]]) / denom[v]
        if x < -tol or x > 1.0 + tol:
            bad = v
            break
        if x < 0.0:
            x = 0.0
        elif x > 1.0:
            x = 1.0
        cbar[v] = x
    return cbar_arr, bad


def descend(const double[::1] probs, const long long[::1] child_ptr, const long long[::1] child_idx,
            const double[::1] uniforms):
    cdef Py_ssize_t depth = uniforms.shape[0]
    path_arr = np.empty(depth, dtype=np.int64)
    cdef long long[::1] path = path_arr
    cdef Py_ssize_t d, j, s, e
    cdef long long node = 0, pick
    cdef double acc, r
    for d in range(depth):
        s = child_ptr[node]
        e = child_ptr[node + 1]
        r = uniforms[d]
        acc = 0.0
        pick = child_idx[e - 1]  # last child absorbs residual float mass
        for j in range(s, e):
            acc += probs[child_idx[j]]
            if r < acc:
                pick = child_idx[j]
                break
        path[d] = pick
        node = pick
    return path_arr


def subtree_probabilities(const double[::1] probs, const long long[::1] parent,
                          const long long[::1] layer_ptr):
    mass_arr = np.empty(probs.shape[0])
    cdef double[::1] mass = mass_arr
    cdef Py_ssize_t v
    mass[0] = 1.0
    for v in range(1, probs.shape[0]):
        mass[v] = mass[parent[v]] * probs[v]
    return mass_arr

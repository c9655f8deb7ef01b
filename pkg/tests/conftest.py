import numpy as np
import pytest

from rewbench import BoundingCube, build_domain


def min_cone(rng, cube, lipschitz, ceiling=1.0, anchors=4):
    """Random Lipschitz cost: min over anchored cones, clipped into [0, ceiling].

    Each term c_i + L * ||x - z_i|| is L-Lipschitz, and min/clip preserve that.
    """
    lo = np.asarray(cube.origin)
    hi = np.asarray(cube.upper)
    z = rng.uniform(lo, hi, size=(anchors, cube.dimension))
    c = rng.uniform(0.0, ceiling / 2.0, size=anchors)

    def f(x):
        d = np.linalg.norm(z - np.asarray(x, dtype=float), axis=1)
        return float(min(ceiling, np.min(c + lipschitz * d)))

    return f


def rep_costs(domain, f):
    return {idx: f(domain.representative(idx)) for idx in domain.index_set}


@pytest.fixture
def line_domain():
    """Full 1-d grid on [-1, 1], m=3, L=3."""
    return build_domain(BoundingCube((-1.0,), 2.0), 3, lambda x: True, 3.0, seed=0)


@pytest.fixture
def square_domain():
    """Full 2-d grid on [0, 8]^2, m=3, L=1."""
    return build_domain(BoundingCube((0.0, 0.0), 8.0), 3, lambda x: True, 1.0, seed=0)

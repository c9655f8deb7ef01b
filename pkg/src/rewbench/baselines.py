"""Reference online algorithms: flat exponential weighting and projected OGD."""

from __future__ import annotations

import math

import numpy as np

from .errors import CostExceedsCeiling, InvalidRound, ProjectionLeftSet
from .geometry import BoundingCube, DiscretizedDomain, PointIndex
from .rew import CostSample


class Hedge:
    """Exponential weighting over all representative points at once.

    Selection probability of point k at round t is proportional to
    exp(-rate_t * cum_cost(k) / ceiling) with rate_t = sqrt(ln(size) / t).
    """

    def __init__(self, domain: DiscretizedDomain, ceiling: float):
        if ceiling <= 0:
            raise ValueError("cost ceiling must be positive")
        self.domain = domain
        self.ceiling = float(ceiling)
        self.cum_cost = np.zeros(domain.size)
        self.round = 0

    def rate(self, t: int) -> float:
        if t < 1:
            raise InvalidRound(f"round index must be >= 1, got {t}")
        return math.sqrt(math.log(self.domain.size) / t)

    def distribution(self, t: int) -> np.ndarray:
        if t != self.round + 1:
            raise InvalidRound(
                f"round {t} out of step: state has completed {self.round} updates"
            )
        scaled = self.cum_cost / self.ceiling
        weights = np.exp(-self.rate(t) * (scaled - scaled.min()))
        return weights / weights.sum()

    def select(self, t: int, rng: np.random.Generator) -> PointIndex:
        probs = self.distribution(t)
        cdf = np.cumsum(probs)
        j = int(np.searchsorted(cdf, rng.random(), side="right"))
        if j >= probs.size:
            j = probs.size - 1
        return self.domain.index_set[j]

    def update(self, costs) -> None:
        sample = costs if isinstance(costs, CostSample) else CostSample.from_mapping(self.domain, costs)
        if sample.array.max() > self.ceiling + 1e-12:
            raise CostExceedsCeiling(
                f"cost {sample.array.max()} exceeds ceiling {self.ceiling}"
            )
        self.cum_cost += sample.array
        self.round += 1


class OnlineGradientDescent:
    """Projected subgradient steps with step size edge/(lipschitz * sqrt(t))."""

    def __init__(self, start, edge_length: float, lipschitz: float, oracle=None):
        if lipschitz <= 0:
            raise ValueError("gradient steps need a positive Lipschitz constant")
        self.current = np.array(start, dtype=float)
        self.step_scale = float(edge_length) / float(lipschitz)
        self.round = 0
        self.oracle = oracle

    def step(self, gradient, t: int, projector) -> np.ndarray:
        """Move against `gradient`, project back into the set, advance the round."""
        if t != self.round + 1:
            raise InvalidRound(
                f"round {t} out of step: state has completed {self.round} updates"
            )
        grad = np.asarray(gradient, dtype=float)
        candidate = self.current - (self.step_scale / math.sqrt(t)) * grad
        moved = np.asarray(projector(candidate), dtype=float)
        if self.oracle is not None and not self.oracle(moved):
            raise ProjectionLeftSet(f"projected point {moved!r} is outside the decision set")
        self.current = moved
        self.round += 1
        return moved.copy()


def cube_projector(cube: BoundingCube):
    """Euclidean projection onto an axis-aligned cube (coordinate-wise clip)."""
    lo = np.asarray(cube.origin)
    hi = np.asarray(cube.upper)

    def project(x):
        return np.clip(np.asarray(x, dtype=float), lo, hi)

    return project

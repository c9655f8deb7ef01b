"""Cost streams for the benchmark plus exact offline-optimum oracles.

The benchmark family is a piecewise-linear "double valley" on [-1, 1]: the
left half descends from 1 at x = -1 to 0 at x = -b and climbs back to 1 at
x = 0; the right half dips to a second valley at x = a.  Two variants differ
only in that right half:

* ``paper-formula``:     1 - x/a on [0, a),      (x-a)/(1-a) on [a, 1]
  (right valley bottoms out at 0);
* ``figure-consistent``: 1 - x/(2a) on [0, a),   0.5 + (x-a)/(2(1-a)) on [a, 1]
  (right valley bottoms out at 0.5, making the right half a strictly worse
  trap for greedy methods).

Both are continuous on [-1, 1], take values in [0, 1], and are 3-Lipschitz
for every a, b in [1/3, 2/3].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingCost, ParamOutOfRange
from .geometry import DiscretizedDomain, PointIndex

VARIANTS = ("paper-formula", "figure-consistent")
PARAM_LOW = 1.0 / 3.0
PARAM_HIGH = 2.0 / 3.0

_DOMAIN_TOL = 1e-9
_LIPSCHITZ = 3.0
_CEILING = 1.0


@dataclass(frozen=True)
class PiecewiseVParams:
    """Valley positions for one round: a (right half), b (left half)."""

    a: float
    b: float
    variant: str = "figure-consistent"

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not PARAM_LOW <= self.a <= PARAM_HIGH:
            raise ParamOutOfRange(f"a={self.a} outside [{PARAM_LOW}, {PARAM_HIGH}]")
        if not PARAM_LOW <= self.b <= PARAM_HIGH:
            raise ParamOutOfRange(f"b={self.b} outside [{PARAM_LOW}, {PARAM_HIGH}]")
        if self.variant not in VARIANTS:
            raise ParamOutOfRange(f"unknown variant {self.variant!r}; choose from {VARIANTS}")


class CostFunction:
    """A bounded Lipschitz per-round cost with an optional subgradient."""

    __slots__ = ("evaluate", "subgradient", "lipschitz_L", "ceiling", "params")

    def __init__(self, evaluate, lipschitz_L, ceiling, subgradient=None, params=None):
        self.evaluate = evaluate
        self.subgradient = subgradient
        self.lipschitz_L = float(lipschitz_L)
        self.ceiling = float(ceiling)
        self.params = params

    def __call__(self, x):
        return self.evaluate(x)


def _branch_values(x, a, b, variant):
    # broadcasts either way: array x with scalar (a, b), or scalar x with arrays
    left_outer = 1.0 - (x + 1.0) / (1.0 - b)
    left_inner = (x + b) / b
    if variant == "paper-formula":
        right_inner = 1.0 - x / a
        right_outer = (x - a) / (1.0 - a)
    else:
        right_inner = 1.0 - x / (2.0 * a)
        right_outer = 0.5 + (x - a) / (2.0 * (1.0 - a))
    return np.where(
        x < -b, left_outer, np.where(x < 0.0, left_inner, np.where(x < a, right_inner, right_outer))
    )


def _clip_domain(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -1.0 - _DOMAIN_TOL) or np.any(arr > 1.0 + _DOMAIN_TOL):
        raise ValueError("decision outside [-1, 1]")
    return np.clip(arr, -1.0, 1.0)


def piecewise_v(params: PiecewiseVParams) -> CostFunction:
    """The double-valley cost for one round; accepts scalars or 1-d arrays."""
    a, b, variant = params.a, params.b, params.variant

    def evaluate(x):
        arr = _clip_domain(x)
        out = _branch_values(arr, a, b, variant)
        return float(out) if np.ndim(x) == 0 else out

    def subgradient(x):
        # at the two valley kinks 0 is a valid subgradient; elsewhere take the
        # slope of the branch left of x (the first branch's slope at x = -1)
        v = float(_clip_domain(x))
        if v == -b or v == a:
            return 0.0
        if v <= -b:
            return -1.0 / (1.0 - b)
        if v <= 0.0:
            return 1.0 / b
        if variant == "paper-formula":
            return -1.0 / a if v <= a else 1.0 / (1.0 - a)
        return -1.0 / (2.0 * a) if v <= a else 1.0 / (2.0 * (1.0 - a))

    return CostFunction(evaluate, _LIPSCHITZ, _CEILING, subgradient, params)


@dataclass(frozen=True)
class StreamConfig:
    """Horizon, seed, and variant for the uniform double-valley stream."""

    horizon: int
    seed: int
    variant: str = "figure-consistent"

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ParamOutOfRange(f"horizon must be >= 1, got {self.horizon}")
        if self.variant not in VARIANTS:
            raise ParamOutOfRange(f"unknown variant {self.variant!r}")


def uniform_params(horizon: int, seed: int) -> np.ndarray:
    """(horizon, 2) array of per-round (a_t, b_t), i.i.d. uniform on [1/3, 2/3]."""
    rng = np.random.default_rng(seed)
    return rng.uniform(PARAM_LOW, PARAM_HIGH, size=(horizon, 2))


def uniform_stream(config: StreamConfig) -> list[CostFunction]:
    """The full adversary sequence for `config`, deterministic given the seed."""
    draws = uniform_params(config.horizon, config.seed)
    return [
        piecewise_v(PiecewiseVParams(float(a), float(b), config.variant))
        for a, b in draws
    ]


def offline_optimum_piecewise(params_seq) -> tuple[float, float]:
    """Exact minimizer of the summed stream over [-1, 1].

    The cumulative sum is piecewise linear with kinks only at {-1, 0, 1} and
    the per-round valley positions, so evaluating it at every kink is exact.
    Ties break toward the smallest x.
    """
    params_seq = list(params_seq)
    if not params_seq:
        raise ValueError("empty stream")
    points = np.unique(
        np.concatenate(
            (
                [-1.0, 0.0, 1.0],
                [-p.b for p in params_seq],
                [p.a for p in params_seq],
            )
        )
    )
    total = np.zeros_like(points)
    for p in params_seq:
        total += _branch_values(points, p.a, p.b, p.variant)
    j = int(np.argmin(total))
    return float(points[j]), float(total[j])


def offline_optimum_grid(domain: DiscretizedDomain, cumulative) -> tuple[PointIndex, float]:
    """Argmin of cumulative grid costs over the index set, lexicographic ties."""
    values = np.empty(domain.size)
    for pos, idx in enumerate(domain.index_set):
        try:
            values[pos] = cumulative[idx]
        except KeyError:
            raise MissingCost(idx) from None
    j = int(np.argmin(values))
    return domain.index_set[j], float(values[j])


class PrefixOptimum:
    """Running exact minimum of the cumulative double-valley cost over [-1, 1].

    Keeps the cumulative value at every kink seen so far.  A new kink's
    cumulative value is the direct sum of all past rounds evaluated there
    (vectorized over the stored parameter history), so no interpolation
    error accrues.
    """

    def __init__(self, variant: str = "figure-consistent"):
        if variant not in VARIANTS:
            raise ParamOutOfRange(f"unknown variant {variant!r}")
        self.variant = variant
        self._xs = np.array([-1.0, 0.0, 1.0])
        self._vals = np.zeros(3)
        self._a = np.empty(64)
        self._b = np.empty(64)
        self.rounds = 0

    def _grow(self) -> None:
        if self.rounds == self._a.size:
            self._a = np.concatenate((self._a, np.empty(self._a.size)))
            self._b = np.concatenate((self._b, np.empty(self._b.size)))

    def add(self, a: float, b: float) -> None:
        a = float(a)
        b = float(b)
        for x in (-b, a):
            pos = int(np.searchsorted(self._xs, x))
            if pos < self._xs.size and self._xs[pos] == x:
                continue
            history = 0.0
            if self.rounds:
                history = float(
                    np.sum(
                        _branch_values(x, self._a[: self.rounds], self._b[: self.rounds], self.variant)
                    )
                )
            self._xs = np.insert(self._xs, pos, x)
            self._vals = np.insert(self._vals, pos, history)
        self._grow()
        self._a[self.rounds] = a
        self._b[self.rounds] = b
        self.rounds += 1
        self._vals += _branch_values(self._xs, a, b, self.variant)

    def minimum(self) -> tuple[float, float]:
        """Current (argmin, min); ties break toward the smallest x."""
        j = int(np.argmin(self._vals))
        return float(self._xs[j]), float(self._vals[j])

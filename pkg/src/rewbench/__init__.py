"""Recursive exponential weighting for online non-convex optimization.

Library layout: `geometry` discretizes a bounded decision set into an index
grid, `partition` layers that grid into a sampling tree, `rew` runs the
recursive weighting engine over it, `baselines` has flat exponential
weighting and projected OGD, `adversaries` the benchmark cost streams and
offline oracles, `harness` the experiment runner, regret accounting, and
bound calculators.  Hot kernels live in a compiled extension with a numpy
fallback (see `rewbench.kernels`).
"""

__version__ = "0.1.0"

from . import kernels
from .adversaries import (
    CostFunction,
    PiecewiseVParams,
    PrefixOptimum,
    StreamConfig,
    offline_optimum_grid,
    offline_optimum_piecewise,
    piecewise_v,
    uniform_params,
    uniform_stream,
)
from .baselines import Hedge, OnlineGradientDescent, cube_projector
from .geometry import BoundingCube, DiscretizedDomain, PointIndex, build_domain
from .harness import (
    BoundReport,
    Comparison,
    RegretTrace,
    RunConfig,
    bound_report,
    compare,
    default_granularity,
    discretization_regret_bound,
    run_experiment,
    selection_regret_bound,
    total_regret_bound,
)
from .partition import LayerTree, SubsetId, build_tree
from .rew import CostSample, RewState, SelectionPath, SubsetValues, eta, new_state


def active_backend() -> str:
    """Name of the kernel backend that will be used by default."""
    return kernels.resolve_name(None)


__all__ = [
    "BoundingCube",
    "BoundReport",
    "Comparison",
    "CostFunction",
    "CostSample",
    "DiscretizedDomain",
    "Hedge",
    "LayerTree",
    "OnlineGradientDescent",
    "PiecewiseVParams",
    "PointIndex",
    "PrefixOptimum",
    "RegretTrace",
    "RewState",
    "RunConfig",
    "SelectionPath",
    "StreamConfig",
    "SubsetId",
    "SubsetValues",
    "active_backend",
    "bound_report",
    "build_domain",
    "build_tree",
    "compare",
    "cube_projector",
    "default_granularity",
    "discretization_regret_bound",
    "eta",
    "new_state",
    "offline_optimum_grid",
    "offline_optimum_piecewise",
    "piecewise_v",
    "run_experiment",
    "selection_regret_bound",
    "total_regret_bound",
    "uniform_params",
    "uniform_stream",
]

"""Experiment orchestration: runs, regret accounting, bound calculators, traces.

A run plays `horizon` rounds of select / reveal / update against a cost
stream and accounts regret in continuous costs: the online decision's true
cost minus the best fixed decision's cumulative cost so far.  For the
built-in double-valley stream the offline optimum is exact (kink
enumeration); for user streams it falls back to the grid argmin over
representatives.  Traces go to CSV with a JSON manifest and stream sidecar.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .adversaries import (
    VARIANTS,
    CostFunction,
    PiecewiseVParams,
    PrefixOptimum,
    piecewise_v,
    uniform_params,
)
from .baselines import Hedge, OnlineGradientDescent, cube_projector
from .errors import ConfigurationError, MismatchedHorizon, NumericalError
from .geometry import BoundingCube, build_domain
from .partition import build_tree
from .rew import CostSample, RewState

ALGORITHMS = ("rew", "hedge", "ogd")
TRACE_COLUMNS = ("t", "online_cost", "cum_online", "cum_offline_opt", "time_avg_regret", "bound_time_avg")

_SEED_MASK = (1 << 64) - 1


# -- regret-bound calculators ----------------------------------------------


def default_granularity(horizon: int) -> int:
    """Smallest m with at least sqrt(horizon) cells per axis: ceil(log2(sqrt(T)))."""
    if horizon < 1:
        raise ConfigurationError(f"horizon must be >= 1, got {horizon}")
    return max(0, math.ceil(math.log2(math.sqrt(horizon))))


def selection_regret_bound(n: int, m: int, discrete_lipschitz: float, horizon: int) -> float:
    """Guaranteed ceiling on regret from choosing over the index grid:

    (4n^2 + n/2) * 2^m * L_d * sqrt(T) + 2n^2 * 2^m * L_d.
    """
    scale = float(2**m) * discrete_lipschitz
    root_t = math.sqrt(horizon)
    return (4.0 * n * n + 0.5 * n) * scale * root_t + 2.0 * n * n * scale


def discretization_regret_bound(n: int, m: int, edge: float, lipschitz: float, horizon: int) -> float:
    """Ceiling on regret from playing representatives instead of the continuum:

    sqrt(n) * D * L * T / 2^m.
    """
    return math.sqrt(n) * edge * lipschitz * horizon / float(2**m)


def total_regret_bound(n: int, edge: float, lipschitz: float, horizon: int, m: int | None = None) -> float:
    """Total regret guarantee.

    With m given:  (8n^2 sqrt(n) + n sqrt(n)) * D L sqrt(T)
                   + sqrt(n)/2^m * D L T + 4n^2 sqrt(n) * D L.
    With m absent (granularity coupled to the horizon):
                   (8n^2 sqrt(n) + n sqrt(n) + sqrt(n)) * D L sqrt(T)
                   + 4n^2 sqrt(n) * D L.
    """
    rn = math.sqrt(n)
    dl = edge * lipschitz
    root_t = math.sqrt(horizon)
    tail = 4.0 * n * n * rn * dl
    if m is None:
        return (8.0 * n * n * rn + n * rn + rn) * dl * root_t + tail
    head = (8.0 * n * n * rn + n * rn) * dl * root_t
    return head + discretization_regret_bound(n, m, edge, lipschitz, horizon) + tail


@dataclass(frozen=True)
class BoundReport:
    """The three bound values plus the inputs they were evaluated at."""

    selection_bound: float
    discretization_bound: float
    total_bound: float
    n: int
    edge: float
    lipschitz: float
    discrete_lipschitz: float
    m: int | None
    m_effective: int
    horizon: int

    def as_dict(self) -> dict:
        return {
            "selection_bound": self.selection_bound,
            "discretization_bound": self.discretization_bound,
            "total_bound": self.total_bound,
            "inputs": {
                "n": self.n,
                "D": self.edge,
                "L": self.lipschitz,
                "L_d": self.discrete_lipschitz,
                "m": self.m,
                "m_effective": self.m_effective,
                "T": self.horizon,
            },
        }


def bound_report(n: int, edge: float, lipschitz: float, horizon: int, m: int | None = None) -> BoundReport:
    if n < 1 or edge < 0 or lipschitz < 0 or horizon < 1 or (m is not None and m < 0):
        raise ConfigurationError("bound inputs must be non-negative with n, T >= 1")
    m_eff = m if m is not None else default_granularity(horizon)
    ld = 2.0 * math.sqrt(n) * edge * lipschitz / float(2**m_eff)
    return BoundReport(
        selection_bound=selection_regret_bound(n, m_eff, ld, horizon),
        discretization_bound=discretization_regret_bound(n, m_eff, edge, lipschitz, horizon),
        total_bound=total_regret_bound(n, edge, lipschitz, horizon, m),
        n=n,
        edge=edge,
        lipschitz=lipschitz,
        discrete_lipschitz=ld,
        m=m,
        m_effective=m_eff,
        horizon=horizon,
    )


# -- run configuration and traces ------------------------------------------


@dataclass
class RunConfig:
    algorithm: str
    horizon: int = 3600
    seed: int = 0
    dim: int = 1
    origin: tuple[float, ...] = (-1.0,)
    edge: float = 2.0
    lipschitz: float = 3.0
    ceiling: float = 1.0
    m: int | None = None
    stream: str = "piecewise-uniform"
    variant: str = "figure-consistent"
    out: str | None = None
    refresh_every: int = 1
    backend: str | None = None
    ogd_start: tuple[float, ...] | None = None

    def effective_m(self) -> int:
        return self.m if self.m is not None else default_granularity(self.horizon)

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.horizon < 1:
            raise ConfigurationError(f"horizon must be >= 1, got {self.horizon}")
        if self.seed < 0:
            raise ConfigurationError("seed must be a non-negative integer")
        if self.dim < 1:
            raise ConfigurationError("dimension must be >= 1")
        if len(self.origin) != self.dim:
            raise ConfigurationError("origin length must match the dimension")
        if self.edge <= 0:
            raise ConfigurationError("edge length must be positive")
        if self.lipschitz < 0:
            raise ConfigurationError("Lipschitz constant must be non-negative")
        if self.ceiling <= 0:
            raise ConfigurationError("cost ceiling must be positive")
        if self.m is not None and self.m < 0:
            raise ConfigurationError("granularity m must be non-negative")
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.refresh_every < 1:
            raise ConfigurationError("refresh-every must be >= 1")
        if self.ogd_start is not None and len(self.ogd_start) != self.dim:
            raise ConfigurationError("ogd start point length must match the dimension")


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


@dataclass
class RegretTrace:
    """Per-round accounting plus a run summary (wall time lives only here)."""

    t: np.ndarray
    online_cost: np.ndarray
    cum_online: np.ndarray
    cum_offline_opt: np.ndarray
    time_avg_regret: np.ndarray
    bound_time_avg: np.ndarray
    summary: dict = field(default_factory=dict)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(TRACE_COLUMNS) + "\n")
            for i in range(self.t.size):
                fh.write(
                    f"{int(self.t[i])},{_fmt(self.online_cost[i])},{_fmt(self.cum_online[i])},"
                    f"{_fmt(self.cum_offline_opt[i])},{_fmt(self.time_avg_regret[i])},"
                    f"{_fmt(self.bound_time_avg[i])}\n"
                )


def _cube_oracle(cube: BoundingCube):
    lo = np.asarray(cube.origin) - 1e-12
    hi = np.asarray(cube.upper) + 1e-12
    return lambda x: bool(np.all(x >= lo) and np.all(x <= hi))


def run_experiment(config: RunConfig, stream: list[CostFunction] | None = None) -> RegretTrace:
    """Play one full run and return its trace; writes files when `config.out` is set.

    A programmatic `stream` (one CostFunction per round) overrides the
    configured family and switches offline accounting to the grid argmin.
    Deterministic given the seed.
    """
    config.validate()
    started = time.perf_counter()
    horizon = config.horizon
    n = config.dim
    m = config.effective_m()

    cube = BoundingCube(tuple(config.origin), config.edge)
    domain = build_domain(cube, m, lambda x: True, config.lipschitz, config.seed)
    reps = domain.representatives_matrix

    custom = stream is not None
    params = None
    if custom:
        functions = list(stream)
        if len(functions) != horizon:
            raise ConfigurationError("stream length must match the horizon")
        prefix = None
        cum_grid = np.zeros(domain.size)
    else:
        if config.stream != "piecewise-uniform":
            raise ConfigurationError(f"unknown stream family {config.stream!r}")
        if n != 1:
            raise ConfigurationError("the built-in stream family is one-dimensional")
        params = uniform_params(horizon, config.seed)
        functions = None
        prefix = PrefixOptimum(config.variant)
        rep_axis = reps[:, 0]

    rng = np.random.default_rng(np.random.SeedSequence([config.seed & _SEED_MASK, 1]))

    engine = hedge = descent = None
    backend_name = None
    if config.algorithm == "rew":
        engine = RewState(build_tree(domain), config.backend)
        backend_name = engine.backend
    elif config.algorithm == "hedge":
        hedge = Hedge(domain, config.ceiling)
    else:
        start = config.ogd_start if config.ogd_start is not None else cube.upper
        descent = OnlineGradientDescent(start, config.edge, config.lipschitz, oracle=_cube_oracle(cube))
        project = cube_projector(cube)

    online = np.empty(horizon)
    cum_online = np.empty(horizon)
    cum_offline = np.empty(horizon)
    running = 0.0
    offline_value = 0.0
    decision = None

    for t in range(1, horizon + 1):
        if custom:
            f = functions[t - 1]
        else:
            a_t, b_t = params[t - 1]
            f = piecewise_v(PiecewiseVParams(float(a_t), float(b_t), config.variant))

        if engine is not None:
            decision = engine.select(rng).decision
        elif hedge is not None:
            decision = domain.representative(hedge.select(t, rng))
        else:
            decision = descent.current.copy()

        cost = float(f.evaluate(decision if custom else float(decision[0])))
        if not math.isfinite(cost):
            raise NumericalError(f"non-finite online cost at round {t}")
        running += cost

        if custom:
            rep_costs = np.array([float(f.evaluate(reps[p])) for p in range(domain.size)])
        else:
            rep_costs = f.evaluate(rep_axis)
        sample = CostSample(domain, rep_costs, ceiling=config.ceiling)

        if engine is not None:
            engine.update(sample)
        elif hedge is not None:
            hedge.update(sample)
        else:
            if f.subgradient is None:
                raise ConfigurationError("gradient-based runs need a subgradient-capable stream")
            grad = f.subgradient(decision if custom else float(decision[0]))
            descent.step(np.reshape(np.asarray(grad, dtype=float), n), t, project)

        if custom:
            cum_grid += rep_costs
            if t % config.refresh_every == 0 or t == horizon:
                offline_value = float(cum_grid.min())
        else:
            prefix.add(float(params[t - 1, 0]), float(params[t - 1, 1]))
            if t % config.refresh_every == 0 or t == horizon:
                offline_value = prefix.minimum()[1]

        online[t - 1] = cost
        cum_online[t - 1] = running
        cum_offline[t - 1] = offline_value

    rounds = np.arange(1, horizon + 1, dtype=np.int64)
    time_avg = (cum_online - cum_offline) / rounds
    bound = np.array(
        [total_regret_bound(n, config.edge, config.lipschitz, int(tt), m) for tt in rounds]
    ) / rounds

    summary = {
        "algorithm": config.algorithm,
        "horizon": horizon,
        "seed": config.seed,
        "m": m,
        "backend": backend_name,
        "total_regret": float(cum_online[-1] - cum_offline[-1]),
        "final_time_avg_regret": float(time_avg[-1]),
        "final_decision": [float(v) for v in decision],
        "offline_oracle": "grid-argmin" if custom else "piecewise-breakpoints",
        "wall_time_s": time.perf_counter() - started,
    }
    trace = RegretTrace(rounds, online, cum_online, cum_offline, time_avg, bound, summary)
    if config.out:
        write_run_outputs(config, trace, params)
    return trace


def write_run_outputs(config: RunConfig, trace: RegretTrace, params: np.ndarray | None) -> None:
    """Trace CSV at `config.out`, plus `<stem>.stream.csv` and `<stem>.manifest.json`."""
    out = Path(config.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    trace.write_csv(out)
    stem = out.name[: -len(out.suffix)] if out.suffix else out.name
    stream_name = None
    if params is not None:
        stream_name = f"{stem}.stream.csv"
        with open(out.parent / stream_name, "w") as fh:
            fh.write("t,a,b\n")
            for i in range(params.shape[0]):
                fh.write(f"{i + 1},{_fmt(params[i, 0])},{_fmt(params[i, 1])}\n")
    manifest = {
        "config": {
            "algorithm": config.algorithm,
            "horizon": config.horizon,
            "seed": config.seed,
            "dim": config.dim,
            "origin": list(config.origin),
            "edge": config.edge,
            "lipschitz": config.lipschitz,
            "ceiling": config.ceiling,
            "m": config.m,
            "m_effective": config.effective_m(),
            "stream": config.stream,
            "variant": config.variant,
            "refresh_every": config.refresh_every,
            "backend": config.backend,
            "ogd_start": list(config.ogd_start) if config.ogd_start is not None else None,
        },
        "stream": {
            "family": config.stream,
            "seed": config.seed,
            "variant": config.variant,
            "params_file": stream_name,
        },
        "build": {"version": __version__, "backend": trace.summary.get("backend")},
        "summary": trace.summary,
    }
    with open(out.parent / f"{stem}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- multi-run comparison ----------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    """Aligned traces for several algorithms run against the same stream."""

    labels: tuple[str, ...]
    traces: tuple[RegretTrace, ...]

    def header(self) -> list[str]:
        cols = ["t"]
        for label in self.labels:
            cols += [f"{label}_online_cost", f"{label}_cum_online", f"{label}_time_avg_regret"]
        cols += ["cum_offline_opt", "bound_time_avg"]
        return cols

    def write_csv(self, path) -> None:
        ref = self.traces[0]
        with open(path, "w") as fh:
            fh.write(",".join(self.header()) + "\n")
            for i in range(ref.t.size):
                cells = [str(int(ref.t[i]))]
                for tr in self.traces:
                    cells += [_fmt(tr.online_cost[i]), _fmt(tr.cum_online[i]), _fmt(tr.time_avg_regret[i])]
                cells += [_fmt(ref.cum_offline_opt[i]), _fmt(ref.bound_time_avg[i])]
                fh.write(",".join(cells) + "\n")


def compare(configs) -> Comparison:
    """Run each config against the shared stream and align the traces on t."""
    configs = list(configs)
    if not configs:
        raise ConfigurationError("nothing to compare")
    for c in configs:
        c.validate()
    if len({c.horizon for c in configs}) > 1:
        raise MismatchedHorizon("compared runs must share the horizon")
    if len({(c.seed, c.stream, c.variant) for c in configs}) > 1:
        raise ConfigurationError("compared runs must share the stream (seed, family, variant)")
    labels = []
    seen: dict[str, int] = {}
    for c in configs:
        k = seen.get(c.algorithm, 0) + 1
        seen[c.algorithm] = k
        labels.append(c.algorithm if k == 1 else f"{c.algorithm}{k}")
    traces = tuple(run_experiment(replace(c, out=None)) for c in configs)
    return Comparison(tuple(labels), traces)

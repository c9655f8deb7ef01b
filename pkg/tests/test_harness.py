import json
import math

import numpy as np
import pytest

from rewbench import (
    CostFunction,
    RunConfig,
    bound_report,
    compare,
    default_granularity,
    discretization_regret_bound,
    run_experiment,
    selection_regret_bound,
    total_regret_bound,
    uniform_params,
)
from rewbench.errors import ConfigurationError, MismatchedHorizon, NumericalError

from test_adversaries import eval_reference


class TestBoundCalculators:
    def test_selection_bound_values(self):
        assert selection_regret_bound(1, 8, 0.046875, 3600) == pytest.approx(3264.0, abs=1e-9)
        # sqrt(1) = 1 collapses the horizon term
        scale = 2**5 * 0.25
        assert selection_regret_bound(1, 5, 0.25, 1) == pytest.approx(4.5 * scale + 2.0 * scale, abs=1e-12)
        assert selection_regret_bound(3, 6, 0.0, 500) == 0.0

    def test_discretization_bound_values(self):
        assert discretization_regret_bound(1, 8, 2.0, 3.0, 3600) == pytest.approx(84.375, abs=1e-9)
        one = discretization_regret_bound(2, 4, 1.5, 2.0, 100)
        half = discretization_regret_bound(2, 5, 1.5, 2.0, 100)
        assert half == pytest.approx(one / 2.0, abs=1e-12)
        assert discretization_regret_bound(1, 3, 2.0, 3.0, 0) == 0.0

    def test_total_bound_values(self):
        assert total_regret_bound(1, 2.0, 3.0, 3600, 8) == pytest.approx(3348.375, abs=1e-9)
        assert total_regret_bound(1, 2.0, 3.0, 3600) == pytest.approx(3624.0, abs=1e-9)
        assert total_regret_bound(2, 0.0, 3.0, 100, 4) == 0.0

    def test_total_bound_monotone(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 4))
            edge = float(rng.uniform(0.5, 4.0))
            lip = float(rng.uniform(0.5, 4.0))
            horizon = int(rng.integers(1, 5000))
            m = int(rng.integers(0, 9))
            base = total_regret_bound(n, edge, lip, horizon, m)
            assert total_regret_bound(n, edge, lip, horizon + 100, m) >= base
            assert total_regret_bound(n, edge + 0.5, lip, horizon, m) >= base
            assert total_regret_bound(n, edge, lip + 0.5, horizon, m) >= base
            assert total_regret_bound(n + 1, edge, lip, horizon, m) >= base

    def test_default_granularity(self):
        assert default_granularity(3600) == 6  # 2^6 = 64 >= sqrt(3600)
        assert default_granularity(1) == 0
        assert default_granularity(2) == 1

    def test_bound_report_fields(self):
        report = bound_report(1, 2.0, 3.0, 3600, 8)
        d = report.as_dict()
        assert d["selection_bound"] == pytest.approx(3264.0, abs=1e-9)
        assert d["discretization_bound"] == pytest.approx(84.375, abs=1e-9)
        assert d["total_bound"] == pytest.approx(3348.375, abs=1e-9)
        assert d["inputs"]["L_d"] == pytest.approx(0.046875, abs=1e-15)
        assert report.selection_bound >= 0 and report.total_bound >= 0


class TestRunExperiment:
    def test_single_cell_grid_measures_discretization_gap(self):
        cfg = RunConfig("rew", horizon=50, m=0, seed=3)
        trace = run_experiment(cfg)
        params = uniform_params(50, 3)
        # the lone representative is the cube center x = 0
        costs = np.array([eval_reference(0.0, a, b, "figure-consistent") for a, b in params])
        assert np.allclose(trace.online_cost, costs, atol=1e-12)
        gap = np.cumsum(costs) - trace.cum_offline_opt
        assert np.allclose(trace.time_avg_regret, gap / trace.t, atol=1e-12)

    def test_trace_invariants(self):
        trace = run_experiment(RunConfig("rew", horizon=300, m=5, seed=11))
        recon = (trace.cum_online - trace.cum_offline_opt) / trace.t
        assert np.max(np.abs(recon - trace.time_avg_regret)) <= 1e-12
        assert np.all(np.diff(trace.cum_offline_opt) >= -1e-12)
        assert np.all(np.diff(trace.cum_online) >= 0.0)
        assert np.all(trace.cum_offline_opt <= trace.cum_online + 1.0 * trace.t)
        # offline optimum never beats any fixed point
        params = uniform_params(300, 11)
        rng = np.random.default_rng(0)
        for x in rng.uniform(-1.0, 1.0, 10):
            fixed = np.cumsum([eval_reference(float(x), a, b, "figure-consistent") for a, b in params])
            assert np.all(trace.cum_offline_opt <= fixed + 1e-9)

    def test_all_algorithms_run(self):
        for alg in ("rew", "hedge", "ogd"):
            trace = run_experiment(RunConfig(alg, horizon=40, m=3, seed=1))
            assert trace.t.size == 40
            assert trace.summary["algorithm"] == alg
            assert math.isfinite(trace.summary["total_regret"])

    def test_refresh_every_downgrade(self):
        exact = run_experiment(RunConfig("rew", horizon=60, m=3, seed=2))
        lazy = run_experiment(RunConfig("rew", horizon=60, m=3, seed=2, refresh_every=10))
        assert np.array_equal(exact.cum_online, lazy.cum_online)
        refreshed = np.arange(9, 60, 10)
        assert np.allclose(exact.cum_offline_opt[refreshed], lazy.cum_offline_opt[refreshed], atol=0)
        assert np.all(lazy.cum_offline_opt <= exact.cum_offline_opt + 1e-12)

    def test_bound_column_matches_calculator(self):
        trace = run_experiment(RunConfig("rew", horizon=25, m=4, seed=0))
        for i, t in enumerate(trace.t):
            expect = total_regret_bound(1, 2.0, 3.0, int(t), 4) / t
            assert trace.bound_time_avg[i] == pytest.approx(expect, abs=1e-12)

    def test_custom_stream_grid_fallback(self):
        horizon = 30

        def flat(level):
            return CostFunction(
                lambda x, level=level: float(level),
                lipschitz_L=0.0,
                ceiling=1.0,
                subgradient=lambda x: np.zeros(1),
            )

        levels = np.linspace(0.2, 0.8, horizon)
        stream = [flat(v) for v in levels]
        trace = run_experiment(RunConfig("ogd", horizon=horizon, m=2, seed=0, ceiling=1.0), stream=stream)
        assert trace.summary["offline_oracle"] == "grid-argmin"
        assert np.allclose(trace.cum_online, np.cumsum(levels), atol=1e-12)
        assert np.allclose(trace.cum_offline_opt, np.cumsum(levels), atol=1e-12)

    def test_nan_stream_aborts(self):
        bad = CostFunction(lambda x: float("nan"), 0.0, 1.0, subgradient=lambda x: np.zeros(1))
        with pytest.raises(NumericalError):
            run_experiment(RunConfig("ogd", horizon=3, m=1, seed=0), stream=[bad] * 3)

    def test_config_validation(self):
        with pytest.raises(ConfigurationError):
            run_experiment(RunConfig("sgd", horizon=5))
        with pytest.raises(ConfigurationError):
            run_experiment(RunConfig("rew", horizon=0))
        with pytest.raises(ConfigurationError):
            run_experiment(RunConfig("rew", horizon=5, dim=2, origin=(0.0, 0.0)))
        with pytest.raises(ConfigurationError):
            run_experiment(RunConfig("rew", horizon=5, variant="bogus"))

    def test_ogd_starts_at_configured_point(self):
        trace = run_experiment(RunConfig("ogd", horizon=1, m=1, seed=0))
        # default start is the cube's upper corner, so the first decision is 1
        assert trace.online_cost[0] == pytest.approx(
            eval_reference(1.0, *uniform_params(1, 0)[0], "figure-consistent"), abs=1e-12
        )


class TestOutputs:
    def test_csv_byte_reproducible(self, tmp_path):
        out_a = tmp_path / "a" / "run.csv"
        out_b = tmp_path / "b" / "run.csv"
        run_experiment(RunConfig("rew", horizon=120, m=4, seed=9, out=str(out_a)))
        run_experiment(RunConfig("rew", horizon=120, m=4, seed=9, out=str(out_b)))
        assert out_a.read_bytes() == out_b.read_bytes()
        assert (tmp_path / "a" / "run.stream.csv").read_bytes() == (tmp_path / "b" / "run.stream.csv").read_bytes()

    def test_manifest_contents(self, tmp_path):
        out = tmp_path / "run.csv"
        run_experiment(RunConfig("rew", horizon=20, m=3, seed=5, out=str(out)))
        manifest = json.loads((tmp_path / "run.manifest.json").read_text())
        assert manifest["config"]["algorithm"] == "rew"
        assert manifest["config"]["origin"] == [-1.0]
        assert manifest["config"]["m_effective"] == 3
        assert manifest["stream"]["seed"] == 5
        assert manifest["stream"]["params_file"] == "run.stream.csv"
        assert "wall_time_s" in manifest["summary"]
        assert manifest["build"]["version"]

    def test_trace_csv_columns(self, tmp_path):
        out = tmp_path / "run.csv"
        run_experiment(RunConfig("hedge", horizon=10, m=2, seed=1, out=str(out)))
        lines = out.read_text().splitlines()
        assert lines[0] == "t,online_cost,cum_online,cum_offline_opt,time_avg_regret,bound_time_avg"
        assert len(lines) == 11
        first = lines[1].split(",")
        assert first[0] == "1"
        assert len(first) == 6

    def test_stream_csv_matches_params(self, tmp_path):
        out = tmp_path / "run.csv"
        run_experiment(RunConfig("rew", horizon=15, m=2, seed=21, out=str(out)))
        rows = (tmp_path / "run.stream.csv").read_text().splitlines()
        assert rows[0] == "t,a,b"
        params = uniform_params(15, 21)
        got = np.array([[float(v) for v in r.split(",")[1:]] for r in rows[1:]])
        assert np.allclose(got, params, atol=1e-11)


class TestCompare:
    def test_three_way_alignment(self, tmp_path):
        configs = [RunConfig(a, horizon=30, m=3, seed=4) for a in ("rew", "hedge", "ogd")]
        result = compare(configs)
        assert result.labels == ("rew", "hedge", "ogd")
        header = result.header()
        assert header[0] == "t" and header[-2:] == ["cum_offline_opt", "bound_time_avg"]
        assert sum(c.endswith("time_avg_regret") for c in header) == 3
        out = tmp_path / "cmp.csv"
        result.write_csv(out)
        lines = out.read_text().splitlines()
        assert len(lines) == 31
        assert len(lines[1].split(",")) == len(header)

    def test_identical_configs_identical_columns(self):
        configs = [RunConfig("rew", horizon=25, m=3, seed=8) for _ in range(2)]
        result = compare(configs)
        assert result.labels == ("rew", "rew2")
        assert np.array_equal(result.traces[0].cum_online, result.traces[1].cum_online)

    def test_matches_standalone_run(self):
        cfg = RunConfig("rew", horizon=40, m=3, seed=2)
        result = compare([cfg, RunConfig("ogd", horizon=40, m=3, seed=2)])
        alone = run_experiment(cfg)
        assert np.array_equal(result.traces[0].cum_online, alone.cum_online)
        assert np.array_equal(result.traces[0].time_avg_regret, alone.time_avg_regret)

    def test_mismatched_horizon(self):
        with pytest.raises(MismatchedHorizon):
            compare([RunConfig("rew", horizon=10), RunConfig("ogd", horizon=20)])

    def test_mismatched_stream(self):
        with pytest.raises(ConfigurationError):
            compare([RunConfig("rew", horizon=10, seed=1), RunConfig("ogd", horizon=10, seed=2)])

import math

import numpy as np
import pytest

from rewbench import (
    BoundingCube,
    CostSample,
    Hedge,
    OnlineGradientDescent,
    build_domain,
    cube_projector,
)
from rewbench.errors import CostExceedsCeiling, InvalidRound, ProjectionLeftSet


def always(x):
    return True


def line_domain(m=3):
    return build_domain(BoundingCube((-1.0,), 2.0), m, always, 3.0, seed=0)


class TestHedge:
    def test_uniform_at_round_one(self):
        dom = line_domain()
        agent = Hedge(dom, ceiling=1.0)
        p = agent.distribution(1)
        assert np.allclose(p, 1.0 / dom.size, atol=1e-15)
        assert abs(p.sum() - 1.0) <= 1e-12

    def test_single_point(self):
        dom = build_domain(BoundingCube((-1.0,), 2.0), 2, lambda x: x[0] >= 0.9, 1.0, seed=0)
        agent = Hedge(dom, ceiling=1.0)
        assert agent.select(1, np.random.default_rng(0)) == dom.index_set[0]
        assert agent.distribution(1)[0] == 1.0

    def test_gap_probability_monotone_in_t(self):
        dom = build_domain(BoundingCube((-1.0,), 2.0), 1, always, 1.0, seed=0)
        probs = []
        for t in range(1, 60):
            agent = Hedge(dom, ceiling=1.0)
            agent.cum_cost[:] = [0.0, float(t)]  # unit gap per elapsed round
            agent.round = t - 1
            probs.append(agent.distribution(t)[0])
        assert all(b > a for a, b in zip(probs, probs[1:]))

    def test_shift_invariance(self):
        dom = line_domain()
        agent = Hedge(dom, ceiling=1.0)
        rng = np.random.default_rng(0)
        agent.cum_cost[:] = rng.uniform(0.0, 5.0, dom.size)
        before = agent.distribution(1)
        agent.cum_cost += 123.0
        after = agent.distribution(1)
        assert np.allclose(before, after, atol=1e-12)

    def test_update_accumulates(self):
        dom = line_domain(m=2)
        agent = Hedge(dom, ceiling=1.0)
        rng = np.random.default_rng(4)
        rounds = [rng.uniform(0.0, 1.0, dom.size) for _ in range(2)]
        for values in rounds:
            agent.update(CostSample(dom, values))
        assert agent.round == 2
        assert np.allclose(agent.cum_cost, rounds[0] + rounds[1], atol=0)

    def test_distribution_sums_to_one_every_round(self):
        dom = line_domain(m=3)
        agent = Hedge(dom, ceiling=1.0)
        rng = np.random.default_rng(12)
        for t in range(1, 31):
            assert abs(agent.distribution(t).sum() - 1.0) <= 1e-12
            agent.update(CostSample(dom, rng.uniform(0.0, 1.0, dom.size)))

    def test_zero_costs_only_advance_round(self):
        dom = line_domain(m=2)
        agent = Hedge(dom, ceiling=1.0)
        agent.update(CostSample(dom, np.zeros(dom.size)))
        assert agent.round == 1
        assert np.all(agent.cum_cost == 0.0)

    def test_ceiling_enforced(self):
        dom = line_domain(m=1)
        agent = Hedge(dom, ceiling=1.0)
        with pytest.raises(CostExceedsCeiling):
            agent.update(CostSample(dom, [0.0, 1.5]))

    def test_round_mismatch(self):
        dom = line_domain(m=1)
        agent = Hedge(dom, ceiling=1.0)
        with pytest.raises(InvalidRound):
            agent.distribution(2)


class TestOnlineGradientDescent:
    def test_zero_gradient_keeps_point(self):
        agent = OnlineGradientDescent((0.25,), 2.0, 3.0)
        project = cube_projector(BoundingCube((-1.0,), 2.0))
        agent.step((0.0,), 1, project)
        assert agent.current[0] == 0.25

    def test_projected_step_down(self):
        # x=1, g=3, t=1, D=2, L=3: raw 1 - (2/3)*3 = -1, stays at -1
        agent = OnlineGradientDescent((1.0,), 2.0, 3.0)
        project = cube_projector(BoundingCube((-1.0,), 2.0))
        new = agent.step((3.0,), 1, project)
        assert new[0] == pytest.approx(-1.0, abs=1e-15)

    def test_projected_step_clipped(self):
        # x=0.5, g=-3, t=4: raw 0.5 + (2/(3*2))*3 = 1.5, clipped to 1
        agent = OnlineGradientDescent((0.5,), 2.0, 3.0)
        agent.round = 3
        project = cube_projector(BoundingCube((-1.0,), 2.0))
        new = agent.step((-3.0,), 4, project)
        assert new[0] == pytest.approx(1.0, abs=1e-15)

    def test_iterates_stay_in_set(self):
        cube = BoundingCube((-1.0,), 2.0)
        project = cube_projector(cube)
        rng = np.random.default_rng(8)
        for _ in range(100):
            agent = OnlineGradientDescent((rng.uniform(-1, 1),), 2.0, 3.0)
            for t in range(1, 101):
                agent.step((rng.uniform(-3.0, 3.0),), t, project)
                assert -1.0 <= agent.current[0] <= 1.0

    def test_projection_left_set_detected(self):
        cube = BoundingCube((-1.0,), 2.0)
        lo = np.asarray(cube.origin) - 1e-12
        hi = np.asarray(cube.upper) + 1e-12
        oracle = lambda x: bool(np.all(x >= lo) and np.all(x <= hi))
        agent = OnlineGradientDescent((0.0,), 2.0, 3.0, oracle=oracle)
        broken = lambda x: np.asarray(x, dtype=float)  # identity, no projection
        with pytest.raises(ProjectionLeftSet):
            agent.step((-30.0,), 1, broken)

    def test_round_mismatch(self):
        agent = OnlineGradientDescent((0.0,), 2.0, 3.0)
        with pytest.raises(InvalidRound):
            agent.step((1.0,), 5, lambda x: x)

    def test_quadratic_stream_sanity(self):
        # f_t(x) = (x - 0.3)^2 on [-1, 1]; best fixed point costs 0, so the
        # time-average regret is just the mean of the iterates' costs
        cube = BoundingCube((-1.0,), 2.0)
        project = cube_projector(cube)
        agent = OnlineGradientDescent((1.0,), 2.0, 2.6)
        total = 0.0
        for t in range(1, 2001):
            x = agent.current[0]
            total += (x - 0.3) ** 2
            agent.step((2.0 * (x - 0.3),), t, project)
        assert total / 2000.0 <= 0.05

import math

import numpy as np
import pytest

from ppgd import (
    DataSet,
    InitPlan,
    build_init_plan,
    build_initial_params,
    choose_breakpoints,
    forward,
    sample_direction,
)
from ppgd.network import preactivations
from ppgd.rng import make_rng


class TestSampleDirection:
    def test_unit_norm(self):
        rng = make_rng(0)
        for d in (1, 2, 4, 6):
            for _ in range(20):
                c = sample_direction(d, rng)
                assert abs(np.linalg.norm(c) - 1.0) < 1e-12
                assert np.abs(c).max() <= 1.0

    def test_one_dimensional_is_sign(self):
        rng = make_rng(1)
        vals = {float(sample_direction(1, rng)[0]) for _ in range(20)}
        assert vals <= {-1.0, 1.0}
        assert len(vals) == 2

    def test_deterministic_given_stream(self):
        a = sample_direction(4, make_rng(42))
        b = sample_direction(4, make_rng(42))
        assert np.array_equal(a, b)


class TestChooseBreakpoints:
    def test_vacuous_example(self):
        # no projections, K=2, A=1, d=1: first point sits at -3, the single
        # subinterval of [-1, 1] has midpoint 0
        bks = choose_breakpoints([], 2, 0, 1.0, 1)
        assert np.array_equal(bks, [-3.0, 0.0])

    def test_requires_k_at_least_two(self):
        with pytest.raises(ValueError):
            choose_breakpoints([], 1, 0, 1.0, 1)

    def check_guarantees(self, proj, bks, K, n, a_bound, d):
        s = math.sqrt(d) * a_bound
        guard = s / ((n + 1) * (K - 1))
        assert bks[0] <= -s
        assert bks[-1] >= s - 4.0 * s / (K - 1)
        diffs = np.diff(bks)
        assert np.all(diffs >= guard)
        assert np.all(diffs <= 4.0 * s / (K - 1))
        if len(proj):
            assert np.abs(np.asarray(proj)[:, None] - bks[None, :]).min() >= guard

    def test_guarantees_random(self):
        rng = make_rng(2)
        for _ in range(100):
            n = int(rng.integers(1, 120))
            d = int(rng.integers(1, 7))
            K = int(rng.integers(2, 15))
            a_bound = float(rng.uniform(1.0, 2.5))
            s = math.sqrt(d) * a_bound
            proj = rng.uniform(-s, s, n)
            bks = choose_breakpoints(proj, K, n, a_bound, d)
            self.check_guarantees(proj, bks, K, n, a_bound, d)

    def test_clustered_projections(self):
        # n equal projections cannot block every subinterval
        n, K = 50, 4
        proj = np.full(n, 0.37)
        bks = choose_breakpoints(proj, K, n, 1.0, 1)
        self.check_guarantees(proj, bks, K, n, 1.0, 1)

    def test_projection_on_shared_endpoint(self):
        # a projection exactly on a shared subinterval endpoint disqualifies
        # both neighbours; the construction still succeeds
        n, K, a_bound, d = 1, 2, 1.0, 1
        width = 2.0 / (K - 1) / (n + 1)  # s = 1
        proj = np.array([-1.0 + width])  # shared endpoint of the two bins
        bks = choose_breakpoints(proj, K, n, a_bound, d)
        assert bks[0] <= -1.0
        assert np.all(np.diff(bks) > 0)

    def test_deterministic(self):
        proj = make_rng(3).uniform(-1, 1, 30)
        a = choose_breakpoints(proj, 6, 30, 1.0, 1)
        b = choose_breakpoints(proj, 6, 30, 1.0, 1)
        assert np.array_equal(a, b)

    def test_rejects_out_of_range_projections(self):
        with pytest.raises(ValueError):
            choose_breakpoints([2.5], 3, 1, 1.0, 1)


class TestBuildInitialParams:
    def make_plan_and_data(self, seed, n=40, d=3, r=2, K=5, rho=1e4):
        rng = make_rng(seed)
        xs = rng.uniform(-1, 1, (n, d))
        data = DataSet(xs, rng.standard_normal(n), a_bound=1.0)
        plan = build_init_plan(data, r, K, rho, rng)
        return plan, data

    def test_initial_network_is_zero(self):
        plan, data = self.make_plan_and_data(0)
        params = build_initial_params(plan, 2, 5, 3)
        assert np.all(params.outer == 0.0)
        assert np.all(forward(params, data.xs) == 0.0)

    def test_preactivation_identity(self):
        # neuron (s, k) computes rho * (c_s . x - b_k) up to rounding
        plan, data = self.make_plan_and_data(1)
        params = build_initial_params(plan, 2, 5, 3)
        Z = preactivations(params, data.xs)
        for s_idx in range(2):
            expected = plan.rho * (data.xs @ plan.directions[s_idx])[:, None]
            expected = expected - plan.rho * plan.breakpoints[s_idx][None, :]
            got = Z[:, s_idx * 5 : (s_idx + 1) * 5]
            assert np.allclose(got, expected, rtol=1e-12, atol=1e-9 * plan.rho)

    def test_margin_guarantee(self):
        for seed in range(10):
            plan, data = self.make_plan_and_data(seed, n=60, d=4, r=1, K=6, rho=3600 * 6)
            params = build_initial_params(plan, 1, 6, 4)
            margin = np.abs(preactivations(params, data.xs)).min()
            guard = math.sqrt(4) * 1.0 / ((60 + 1) * (6 - 1))
            assert margin >= plan.rho * guard

    def test_plan_shape_validation(self):
        plan, _ = self.make_plan_and_data(2)
        with pytest.raises(ValueError):
            build_initial_params(plan, 1, 5, 3)

    def test_plan_invariants(self):
        with pytest.raises(ValueError):
            InitPlan(np.array([[2.0, 0.0]]), np.array([[0.0, 1.0]]), 10.0)
        with pytest.raises(ValueError):
            InitPlan(np.array([[1.0, 0.0]]), np.array([[1.0, 0.0]]), 10.0)

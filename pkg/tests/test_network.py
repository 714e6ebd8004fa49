import math

import numpy as np
import pytest

from ppgd import (
    DataSet,
    NetworkParams,
    forward,
    gradient,
    penalized_risk,
    sigmoid,
    sigmoid_prime,
    truncate,
)


def random_instance(rng, d=None, neurons=None, n=None, weight_scale=10.0):
    d = d or int(rng.integers(1, 5))
    neurons = neurons or int(rng.integers(1, 11))
    n = n or int(rng.integers(2, 51))
    params = NetworkParams(
        rng.uniform(-weight_scale, weight_scale, neurons + 1),
        rng.uniform(-weight_scale, weight_scale, (neurons, d + 1)),
    )
    xs = rng.uniform(-1, 1, (n, d))
    ys = rng.standard_normal(n)
    return params, DataSet(xs, ys, a_bound=1.0)


class TestSigmoid:
    def test_zero(self):
        assert sigmoid(0.0) == 0.5

    def test_saturation(self):
        assert sigmoid(1e9) == 1.0
        assert sigmoid(-1e9) == 0.0

    def test_known_value(self):
        # 1/(1+e^-1) to double precision
        assert sigmoid(1.0) == pytest.approx(0.7310585786300049, abs=1e-16)

    def test_monotone(self):
        z = np.linspace(-40, 40, 4001)
        assert np.all(np.diff(sigmoid(z)) >= 0)

    def test_no_overflow_any_finite(self):
        z = np.array([-1e308, -1e12, -745.0, -37.0, 37.0, 745.0, 1e12, 1e308])
        s = sigmoid(z)
        assert np.all(np.isfinite(s))
        assert np.all((s >= 0) & (s <= 1))

    def test_prime_bounded_by_exp(self):
        # sigma'(z) = sigma(1-sigma) <= exp(-|z|) everywhere
        z = np.linspace(-60, 60, 12001)
        assert np.all(sigmoid_prime(z) <= np.exp(-np.abs(z)))


class TestForward:
    def test_zero_outer_weights(self):
        rng = np.random.default_rng(0)
        params = NetworkParams(np.zeros(4), rng.standard_normal((3, 3)))
        for _ in range(5):
            assert forward(params, rng.uniform(-1, 1, 2)) == 0.0

    def test_single_neuron_midpoint(self):
        params = NetworkParams([0.0, 1.0], [[0.0, 0.0, 0.0]])
        assert forward(params, [0.3, -0.7]) == 0.5

    def test_matches_reverse_order_summation(self):
        # independent re-implementation summing the neurons in reverse order
        rng = np.random.default_rng(7)
        for _ in range(10):
            params, data = random_instance(rng, weight_scale=2.0)
            x = data.xs[0]
            acc = 0.0
            for k in range(params.neurons - 1, -1, -1):
                z = float(params.inner[k, 1:] @ x + params.inner[k, 0])
                acc += params.outer[k + 1] * sigmoid(z)
            acc += params.outer[0]
            got = forward(params, x)
            assert got == pytest.approx(acc, rel=1e-12)

    def test_dimension_mismatch(self):
        params = NetworkParams([0.0, 1.0], [[0.0, 1.0, 2.0]])
        with pytest.raises(ValueError):
            forward(params, [1.0, 2.0, 3.0])

    def test_huge_inner_scale_stays_finite(self):
        rng = np.random.default_rng(3)
        inner = np.hstack([rng.uniform(-1, 1, (6, 1)), rng.uniform(-1, 1, (6, 3))]) * 1e12
        params = NetworkParams(rng.standard_normal(7), inner)
        vals = forward(params, rng.uniform(-1, 1, (100, 3)))
        assert np.all(np.isfinite(vals))


class TestPenalizedRisk:
    def test_zero_params_unit_targets(self):
        params = NetworkParams.zeros(2, 2)
        data = DataSet([[0.1, 0.2], [0.3, 0.4]], [1.0, -1.0])
        rb = penalized_risk(params, data, c1=1.0)
        assert rb.empirical == 1.0 and rb.penalty == 0.0 and rb.total == 1.0

    def test_interpolating_network(self):
        # constant network a0 = y on constant targets: empirical exactly 0
        params = NetworkParams([2.5, 0.0], [[0.0, 1.0]])
        data = DataSet([[0.1], [0.9]], [2.5, 2.5])
        rb = penalized_risk(params, data, c1=3.0)
        assert rb.empirical == 0.0
        assert rb.total == rb.penalty == (3.0 / 2) * 2.5**2

    def test_single_point_hand_value(self):
        # one point, one neuron, hand-set weights
        params = NetworkParams([0.5, 2.0], [[0.25, 1.5]])
        data = DataSet([[0.4]], [1.0], a_bound=1.0)
        s = 1.0 / (1.0 + math.exp(-(1.5 * 0.4 + 0.25)))
        resid = 0.5 + 2.0 * s - 1.0
        expected_emp = resid**2
        expected_pen = 2.0 * (0.5**2 + 2.0**2)
        rb = penalized_risk(params, data, c1=2.0)
        assert rb.empirical == pytest.approx(expected_emp, rel=1e-14)
        assert rb.penalty == pytest.approx(expected_pen, rel=1e-14)

    def test_penalty_includes_output_bias(self):
        params = NetworkParams([3.0, 0.0], [[0.0, 0.0]])
        data = DataSet([[0.0]], [3.5])
        rb = penalized_risk(params, data, c1=1.0)
        assert rb.penalty == 9.0

    def test_total_is_exact_sum(self):
        rng = np.random.default_rng(11)
        params, data = random_instance(rng)
        rb = penalized_risk(params, data, c1=0.7)
        assert rb.total == rb.empirical + rb.penalty

    def test_row_permutation_invariant(self):
        rng = np.random.default_rng(13)
        params, data = random_instance(rng, n=20)
        perm = rng.permutation(20)
        shuffled = DataSet(data.xs[perm], data.ys[perm], data.a_bound)
        a = penalized_risk(params, data, c1=1.0)
        b = penalized_risk(params, shuffled, c1=1.0)
        assert a.total == pytest.approx(b.total, rel=1e-12)


def finite_difference_gradient(params, data, c1):
    """Central differences with per-coordinate step 1e-6 * max(1, |w|)."""
    from ppgd.network import penalized_risk as risk

    def f(outer, inner):
        return risk(NetworkParams(outer, inner), data, c1).total

    g_outer = np.zeros_like(params.outer)
    for i in range(params.outer.size):
        h = 1e-6 * max(1.0, abs(params.outer[i]))
        up, dn = params.outer.copy(), params.outer.copy()
        up[i] += h
        dn[i] -= h
        g_outer[i] = (f(up, params.inner) - f(dn, params.inner)) / (2 * h)
    g_inner = np.zeros_like(params.inner)
    for k in range(params.inner.shape[0]):
        for j in range(params.inner.shape[1]):
            h = 1e-6 * max(1.0, abs(params.inner[k, j]))
            up, dn = params.inner.copy(), params.inner.copy()
            up[k, j] += h
            dn[k, j] -= h
            g_inner[k, j] = (f(params.outer, up) - f(params.outer, dn)) / (2 * h)
    return g_outer, g_inner


def relative_gap(a, b):
    return np.abs(a - b) / np.maximum(1e-6, np.maximum(np.abs(a), np.abs(b)))


class TestGradient:
    def test_zero_outer_weights_freeze_inner(self):
        rng = np.random.default_rng(5)
        inner = rng.standard_normal((4, 3))
        params = NetworkParams(np.zeros(5), inner)
        data = DataSet(rng.uniform(-1, 1, (10, 2)), rng.standard_normal(10))
        g = gradient(params, data, c1=1.0)
        assert np.all(g.inner == 0.0)

    def test_bias_gradient_at_zero_params(self):
        rng = np.random.default_rng(6)
        data = DataSet(rng.uniform(-1, 1, (12, 3)), rng.standard_normal(12))
        params = NetworkParams.zeros(3, 3)
        g = gradient(params, data, c1=1.0)
        assert g.outer[0] == pytest.approx(-2.0 * data.ys.sum() / 12, rel=1e-14)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        for _ in range(8):
            params, data = random_instance(rng)
            g = gradient(params, data, c1=1.0)
            fd_outer, fd_inner = finite_difference_gradient(params, data, 1.0)
            assert relative_gap(g.outer, fd_outer).max() < 1e-6
            assert relative_gap(g.inner, fd_inner).max() < 1e-6


class TestTruncate:
    def test_interior(self):
        assert truncate(0.3, 1.0) == 0.3

    def test_clamps(self):
        assert truncate(5.0, 1.0) == 1.0
        assert truncate(-5.0, 1.0) == -1.0

    def test_boundary_fixed_point(self):
        assert truncate(-1.0, 1.0) == -1.0

    def test_array(self):
        out = truncate(np.array([-3.0, 0.2, 3.0]), 0.5)
        assert np.array_equal(out, [-0.5, 0.2, 0.5])

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ValueError):
            truncate(1.0, 0.0)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bwflow import (
    InterpScheme,
    TimeSingularity,
    apply_path_operator,
    bw_velocity,
    discrete_edge_velocity,
    discrete_node_velocity,
    edge_channel_rates,
    numerical_velocity,
    path_operator,
)
from helpers import pair_mrfs, weighted_mrf


def test_time_singularity_and_domain():
    g0, g1 = pair_mrfs()
    with pytest.raises(TimeSingularity):
        bw_velocity(g0, g1, 1.0)
    with pytest.raises(TimeSingularity):
        bw_velocity(g0, g1, 1.0 - 1e-7)
    with pytest.raises(ValueError):
        bw_velocity(g0, g1, -0.01)
    # just inside the limit is fine
    assert np.isfinite(bw_velocity(g0, g1, 1.0 - 1e-5).w_dot).all()


def test_two_node_initial_rate():
    # weights 1 -> 4: the scalar sweep law w_t = 1/(2 sigma_t) with
    # sigma_t = ((1-t)/sqrt(2) + t/sqrt(8))^2 has w'(0) = 1.
    g0, g1 = pair_mrfs(1.0, 4.0)
    v = bw_velocity(g0, g1, 0.0)
    assert v.w_dot[0, 1] == pytest.approx(1.0, rel=1e-9)


def test_two_node_midpath_rate_matches_analytic():
    g0, g1 = pair_mrfs(1.0, 4.0)

    def w_of(t):
        sig = ((1 - t) / np.sqrt(2.0) + t / np.sqrt(8.0)) ** 2
        return 1.0 / (2.0 * sig)

    for t in (0.3, 0.5, 0.8):
        v = bw_velocity(g0, g1, t)
        h = 1e-6
        analytic = (w_of(t + h) - w_of(t - h)) / (2 * h)
        assert v.w_dot[0, 1] == pytest.approx(analytic, rel=1e-5)


@settings(deadline=None, max_examples=15)
@given(st.integers(0, 10**6), st.floats(0.05, 0.9))
def test_closed_form_matches_finite_difference(seed, t):
    rng = np.random.default_rng(seed)
    g0 = weighted_mrf(5, rng)
    g1 = weighted_mrf(5, rng)
    v = bw_velocity(g0, g1, t)
    fd = numerical_velocity(g0, g1, t, 1e-5, InterpScheme(kind="bw"))
    assert np.abs(v.l_dot - fd.l_dot).max() < 1e-4
    assert np.abs(v.w_dot - fd.w_dot).max() < 1e-4


def test_path_operator_kernel_and_application():
    rng = np.random.default_rng(2)
    g0 = weighted_mrf(5, rng)
    g1 = weighted_mrf(5, rng)
    s = path_operator(g0, g1, 0.4)
    l_dot = apply_path_operator(s, g0.laplacian)
    # centered: the constant direction stays in the kernel
    assert np.abs(l_dot @ np.ones(5)).max() < 1e-9
    assert np.allclose(l_dot, l_dot.T)


def test_self_path_has_zero_velocity():
    g0, _ = pair_mrfs(2.0, 2.0)
    v = bw_velocity(g0, g0, 0.5)
    assert np.abs(v.l_dot).max() < 1e-9
    assert np.abs(v.w_dot).max() < 1e-9


def test_x_dot_is_mean_difference():
    from bwflow import GraphMRF, laplacian
    from helpers import pair_graph

    x0 = np.array([[0.0], [1.0]])
    x1 = np.array([[2.0], [5.0]])
    g0 = GraphMRF(mean=x0, laplacian=laplacian(pair_graph(1.0)))
    g1 = GraphMRF(mean=x1, laplacian=laplacian(pair_graph(4.0)))
    v = bw_velocity(g0, g1, 0.3)
    assert np.array_equal(v.x_dot, x1 - x0)


def test_discrete_edge_velocity_pinned_values():
    # W = 1/2, W_dot = 1: rate is +4 at E=0 and -4 at E=1.
    w = np.array([[0.0, 0.5], [0.5, 0.0]])
    wd = np.array([[0.0, 1.0], [1.0, 0.0]])
    r0 = discrete_edge_velocity(np.zeros((2, 2)), w, wd)
    r1 = discrete_edge_velocity(np.ones((2, 2)), w, wd)
    assert r0[0, 1] == pytest.approx(4.0, rel=1e-12)
    assert r1[0, 1] == pytest.approx(-4.0, rel=1e-12)


def test_discrete_edge_velocity_clamps_saturated_marginal():
    w = np.array([[0.0, 1.0], [1.0, 0.0]])  # saturated marginal
    wd = np.ones((2, 2))
    r = discrete_edge_velocity(np.zeros((2, 2)), w, wd, clamp_eps=1e-3)
    assert np.isfinite(r).all()


@settings(deadline=None, max_examples=50)
@given(
    st.floats(0.01, 0.99),
    st.floats(-5.0, 5.0),
)
def test_channel_rates_balance(w, wd):
    v01, v10 = edge_channel_rates(np.array([w]), np.array([wd]))
    residual = (1.0 - w) * v01[0] - w * v10[0] - wd
    assert abs(residual) < 1e-12


def test_channel_rates_relate_to_flip_rates():
    w = np.array([0.3])
    wd = np.array([1.7])
    v01, v10 = edge_channel_rates(w, wd)
    r_at_0 = discrete_edge_velocity(np.zeros(1), w, wd, clamp_eps=0.0)
    r_at_1 = discrete_edge_velocity(np.ones(1), w, wd, clamp_eps=0.0)
    assert v01[0] == pytest.approx(w[0] * r_at_0[0] / 2.0, rel=1e-12)
    assert v10[0] == pytest.approx((1.0 - w[0]) * r_at_1[0] / 2.0, rel=1e-12)


def test_discrete_node_velocity_row():
    # K = 2, t = 1/2, state differs from target: rates (-2, +2).
    x_t = np.array([[1.0, 0.0]])
    x1 = np.array([[0.0, 1.0]])
    v = discrete_node_velocity(x_t, x1, 0.5)
    assert np.allclose(v, [[-2.0, 2.0]])
    assert v.sum() == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(TimeSingularity):
        discrete_node_velocity(x_t, x1, 1.0)
    with pytest.raises(ValueError):
        discrete_node_velocity(x_t, np.zeros((2, 2)), 0.5)


def test_numerical_velocity_validation_and_baseline_use():
    g0, g1 = pair_mrfs(1.0, 4.0)
    with pytest.raises(ValueError):
        numerical_velocity(g0, g1, 0.0, 1e-3, InterpScheme(kind="linear"))
    with pytest.raises(ValueError):
        numerical_velocity(g0, g1, 0.5, 0.0, InterpScheme(kind="linear"))
    v = numerical_velocity(g0, g1, 0.5, 1e-4, InterpScheme(kind="linear"))
    # linear path has constant slope w1 - w0 = 3 on the edge
    assert v.w_dot[0, 1] == pytest.approx(3.0, rel=1e-6)
    assert v.transport is None

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bwflow import (
    DisconnectedGraph,
    GaussianMeasure,
    Graph,
    bures_psd,
    gaussian_w2_sq,
    graph_bw_distance,
    graph_bw_terms,
    mrf_covariance,
    mrf_from_graph,
)
from helpers import pair_mrfs, weighted_mrf


def test_gaussian_w2_commuting_closed_form():
    # Diagonal covariances: W2^2 = |mu0-mu1|^2 + sum (sqrt(a_i)-sqrt(b_i))^2.
    a = GaussianMeasure(mean=[0.0, 0.0], cov=np.diag([1.0, 4.0]))
    b = GaussianMeasure(mean=[1.0, -1.0], cov=np.diag([9.0, 1.0]))
    expected = 2.0 + (1.0 - 3.0) ** 2 + (2.0 - 1.0) ** 2
    assert gaussian_w2_sq(a, b) == pytest.approx(expected, rel=1e-12)


def test_gaussian_w2_metric_axioms():
    rng = np.random.default_rng(7)
    f = rng.standard_normal((4, 4))
    a = GaussianMeasure(mean=rng.standard_normal(4), cov=f @ f.T)
    g = rng.standard_normal((4, 4))
    b = GaussianMeasure(mean=rng.standard_normal(4), cov=g @ g.T)
    assert gaussian_w2_sq(a, a) == pytest.approx(0.0, abs=1e-10)
    assert gaussian_w2_sq(a, b) == pytest.approx(gaussian_w2_sq(b, a), rel=1e-9)
    assert gaussian_w2_sq(a, b) > 0.0


def test_gaussian_w2_dimension_mismatch():
    a = GaussianMeasure(mean=[0.0], cov=np.eye(1))
    b = GaussianMeasure(mean=[0.0, 0.0], cov=np.eye(2))
    with pytest.raises(ValueError):
        gaussian_w2_sq(a, b)


def test_bures_psd_identity_and_scale():
    s = np.diag([1.0, 4.0])
    assert bures_psd(s, s) == pytest.approx(0.0, abs=1e-12)
    assert bures_psd(np.eye(2), 4.0 * np.eye(2)) == pytest.approx(2.0, rel=1e-12)


def test_mrf_covariance_pinv_and_regularized():
    m = weighted_mrf(5, np.random.default_rng(0))
    cov = mrf_covariance(m)
    # Moore-Penrose: L Sigma L = L, and the constant mode is annihilated.
    assert np.abs(m.laplacian @ cov @ m.laplacian - m.laplacian).max() < 1e-9
    assert np.abs(cov @ np.ones(5)).max() < 1e-9
    m_reg = weighted_mrf(5, np.random.default_rng(0), nu=0.3)
    cov_reg = mrf_covariance(m_reg)
    expected = np.linalg.inv(m_reg.laplacian + 0.3 * np.eye(5))
    assert np.abs(cov_reg - expected).max() < 1e-9


def test_mrf_covariance_disconnected():
    w = np.zeros((4, 4))
    w[0, 1] = w[1, 0] = 1.0
    w[2, 3] = w[3, 2] = 1.0
    m = mrf_from_graph(Graph(n=4, w=w))
    with pytest.raises(DisconnectedGraph):
        mrf_covariance(m)
    # nu > 0 lifts the restriction
    assert mrf_covariance(mrf_from_graph(Graph(n=4, w=w), nu=0.5)).shape == (4, 4)


def test_two_node_distance_value():
    # Single edge, weights 1 vs 4, equal means: squared distance 1/8.
    g0, g1 = pair_mrfs(1.0, 4.0)
    assert graph_bw_distance(g0, g1) == pytest.approx(0.125, rel=1e-12)
    mean_term, trace_term = graph_bw_terms(g0, g1)
    assert mean_term == 0.0
    assert trace_term == pytest.approx(0.125, rel=1e-12)


def test_two_node_distance_scalar_law():
    # d^2 = (1/sqrt(2 w0) - 1/sqrt(2 w1))^2 on the single nontrivial mode.
    for w0, w1 in [(0.5, 2.0), (1.0, 9.0), (3.0, 3.0)]:
        g0, g1 = pair_mrfs(w0, w1)
        expected = (1.0 / np.sqrt(2 * w0) - 1.0 / np.sqrt(2 * w1)) ** 2
        assert graph_bw_distance(g0, g1) == pytest.approx(expected, abs=1e-12)


def test_beta_scales_trace_term():
    g0, g1 = pair_mrfs(1.0, 4.0, beta=3.0)
    assert graph_bw_distance(g0, g1) == pytest.approx(3 * 0.125, rel=1e-12)
    g0b, _ = pair_mrfs(1.0, 4.0)
    with pytest.raises(ValueError):
        graph_bw_distance(g0b, g1)


def test_mean_term_adds_feature_distance():
    g0, g1 = pair_mrfs(1.0, 4.0)
    x0 = np.array([[0.0], [0.0]])
    x1 = np.array([[1.0], [2.0]])
    from bwflow import GraphMRF

    a = GraphMRF(mean=x0, laplacian=g0.laplacian)
    b = GraphMRF(mean=x1, laplacian=g1.laplacian)
    assert graph_bw_distance(a, b) == pytest.approx(5.0 + 0.125, rel=1e-10)


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 10**6))
def test_graph_distance_symmetry_and_identity(seed):
    rng = np.random.default_rng(seed)
    a = weighted_mrf(5, rng)
    b = weighted_mrf(5, rng)
    d_ab = graph_bw_distance(a, b)
    d_ba = graph_bw_distance(b, a)
    assert d_ab >= 0.0
    # the two orders evaluate different matrix-function chains; agreement
    # is limited by round-off under trace cancellation, not by the metric
    assert d_ab == pytest.approx(d_ba, rel=1e-5, abs=1e-8)
    assert graph_bw_distance(a, a) == pytest.approx(0.0, abs=1e-9)


@settings(deadline=None, max_examples=15)
@given(st.integers(0, 10**6))
def test_triangle_inequality_on_roots(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (weighted_mrf(4, rng) for _ in range(3))
    d = lambda p, q: np.sqrt(graph_bw_distance(p, q))
    assert d(a, c) <= d(a, b) + d(b, c) + 1e-8

import numpy as np
import pytest

from bwflow import (
    DenoiserOutput,
    Graph,
    KnnDenoiser,
    OracleDenoiser,
    encode_graph,
    graph_distance,
    knn_predict,
    oracle_predict,
)
from helpers import connected_er, pair_graph


def test_output_validation():
    ok = DenoiserOutput(node_probs=np.array([[0.2, 0.8], [1.0, 0.0]]),
                        edge_probs=np.array([[0.0, 0.5], [0.5, 0.0]]))
    assert ok.n == 2
    with pytest.raises(ValueError):
        DenoiserOutput(node_probs=np.array([[0.2, 0.7]]), edge_probs=np.zeros((1, 1)))
    with pytest.raises(ValueError):
        DenoiserOutput(node_probs=np.array([[1.0]]), edge_probs=np.array([[1.5]]))
    with pytest.raises(ValueError):
        DenoiserOutput(node_probs=np.ones((2, 1)),
                       edge_probs=np.array([[0.0, 0.2], [0.8, 0.0]]))
    with pytest.raises(ValueError):
        DenoiserOutput(node_probs=np.ones((3, 1)), edge_probs=np.zeros((2, 2)))


def test_encode_graph_thresholds_and_onehot():
    w = np.array([[0.0, 0.7, 0.2], [0.7, 0.0, 0.9], [0.2, 0.9, 0.0]])
    x = np.array([[0.6, 0.4], [0.1, 0.9], [0.5, 0.5]])
    out = encode_graph(Graph(n=3, w=w, x=x))
    assert np.array_equal(out.edge_probs, np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float))
    assert np.array_equal(out.node_probs, np.array([[1, 0], [0, 1], [1, 0]], dtype=float))


def test_encode_featureless_single_class():
    out = encode_graph(pair_graph(1.0))
    assert out.node_probs.shape == (2, 1)
    assert np.array_equal(out.node_probs, np.ones((2, 1)))


def test_graph_distance_counts_edges_and_classes():
    a = connected_er(6, 0.5, np.random.default_rng(0), classes=3)
    assert graph_distance(a, a) == 0
    b = a.copy()
    b.w[0, 1] = 1.0 - b.w[0, 1]
    b.w[1, 0] = b.w[0, 1]
    assert graph_distance(a, b) == 1
    c = a.copy()
    row = c.x[2].copy()
    c.x[2] = np.roll(row, 1)
    assert graph_distance(a, c) == 1
    with pytest.raises(ValueError):
        graph_distance(a, pair_graph(1.0))


def test_oracle_predict_returns_target_encoding():
    target = connected_er(5, 0.5, np.random.default_rng(1), classes=2)
    noisy = connected_er(5, 0.5, np.random.default_rng(2), classes=2)
    out = oracle_predict(target, noisy, 0.3)
    ref = encode_graph(target)
    assert np.array_equal(out.edge_probs, ref.edge_probs)
    assert np.array_equal(out.node_probs, ref.node_probs)
    with pytest.raises(ValueError):
        oracle_predict(target, pair_graph(1.0), 0.3)


def test_knn_exact_match_wins():
    rng = np.random.default_rng(3)
    train = [connected_er(6, 0.5, rng, classes=2) for _ in range(8)]
    query = train[4]
    out = knn_predict(train, query, 0.5, k=1)
    ref = encode_graph(query)
    assert np.array_equal(out.edge_probs, ref.edge_probs)


def test_knn_averages_k_neighbors():
    g1 = pair_graph(1.0)
    w = np.zeros((2, 2))
    g0 = Graph(n=2, w=w)
    out = knn_predict([g0, g1], g1, 0.5, k=2)
    assert out.edge_probs[0, 1] == pytest.approx(0.5)


def test_knn_tie_break_is_stable():
    # both train graphs are one flip away from the empty query; first wins
    wa = np.zeros((3, 3))
    wa[0, 1] = wa[1, 0] = 1.0
    wb = np.zeros((3, 3))
    wb[1, 2] = wb[2, 1] = 1.0
    query = Graph(n=3, w=np.zeros((3, 3)))
    out = knn_predict([Graph(n=3, w=wa), Graph(n=3, w=wb)], query, 0.1, k=1)
    assert out.edge_probs[0, 1] == 1.0
    assert out.edge_probs[1, 2] == 0.0


def test_knn_validation():
    with pytest.raises(ValueError):
        knn_predict([], pair_graph(1.0), 0.5)
    with pytest.raises(ValueError):
        knn_predict([pair_graph(1.0)], pair_graph(1.0), 0.5, k=2)
    with pytest.raises(ValueError):
        KnnDenoiser(train_set=(), k=1)


def test_denoiser_objects_delegate():
    target = connected_er(4, 0.6, np.random.default_rng(5))
    oracle = OracleDenoiser(target=target)
    assert np.array_equal(oracle.predict(target, 0.0).edge_probs, encode_graph(target).edge_probs)
    knn = KnnDenoiser(train_set=(target,), k=1)
    assert np.array_equal(knn.predict(target, 0.9).edge_probs, encode_graph(target).edge_probs)

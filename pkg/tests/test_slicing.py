import numpy as np
import pytest

from conftest import unit_circle
from rcmsw.data import Dataset, NormalizedDataset, normalize
from rcmsw.errors import InvalidArgumentError
from rcmsw.slicing import build_slice_matrix, knn_indices
from rcmsw.sphere import sample_haar_directions


def test_knn_by_angle():
    X = unit_circle([0, 90, 180])
    V = unit_circle([10])[0]
    assert list(knn_indices(X, V, 1)) == [0]
    assert sorted(knn_indices(X, V, 2)) == [0, 1]


def test_knn_ties_lowest_index():
    X = unit_circle([45, 0, 0, 0, 90])
    # rows 1, 2, 3 are duplicates at the same distance from V
    V = unit_circle([0])[0]
    assert sorted(knn_indices(X, V, 2)) == [1, 2]
    X2 = np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
    assert sorted(knn_indices(X2, np.array([1.0, 0.0]), 1)) == [1]


def test_knn_k_too_large():
    with pytest.raises(InvalidArgumentError):
        knn_indices(unit_circle([0, 90]), np.array([1.0, 0.0]), 3)


def test_slice_hand_example():
    nd = NormalizedDataset(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]), np.array([2.0, 3.0, 5.0]))
    D = build_slice_matrix(nd, np.array([[1.0, 0.0]]), 2).D
    assert D.shape == (2, 1)
    assert np.array_equal(D[:, 0], [0.0, 2.0])


def test_slice_single_entry():
    nd = NormalizedDataset(unit_circle([0, 120, 240]), np.array([1.5, -2.0, 4.0]))
    V = unit_circle([100])
    D = build_slice_matrix(nd, V, 1).D
    assert D.shape == (1, 1)
    assert D[0, 0] == pytest.approx(-2.0 * np.cos(np.deg2rad(20)))


def test_slice_full_sample(gen):
    X = gen.standard_normal((30, 3))
    nd = normalize(Dataset(X, gen.standard_normal(30)))
    dirs = np.asarray(sample_haar_directions(3, 7, seed=2))
    D = build_slice_matrix(nd, dirs, 30).D
    expected = np.sort(nd.pseudo_points() @ dirs.T, axis=0)
    assert np.allclose(D, expected, atol=1e-14)


def test_slice_invariants(gen):
    X = gen.standard_normal((200, 2))
    nd = normalize(Dataset(X, gen.standard_normal(200) * 3))
    dirs = sample_haar_directions(2, 40, seed=3)
    D = build_slice_matrix(nd, dirs, 12).D
    assert np.all(np.diff(D, axis=0) >= 0)
    assert np.all(np.abs(D) <= np.max(np.abs(nd.Yt)) + 1e-12)


def test_slice_permutation_invariant(gen):
    X = gen.standard_normal((150, 3))
    X[10] = X[20]  # an exact duplicate
    Y = gen.standard_normal(150)
    Y[10] = Y[20]
    nd = normalize(Dataset(X, Y))
    dirs = sample_haar_directions(3, 25, seed=8)
    perm = gen.permutation(150)
    nd2 = normalize(Dataset(X[perm], Y[perm]))
    assert np.array_equal(build_slice_matrix(nd, dirs, 9).D, build_slice_matrix(nd2, dirs, 9).D)


def test_slice_blocked_equals_unblocked(gen, monkeypatch):
    import rcmsw.slicing as slicing

    nd = normalize(Dataset(gen.standard_normal((80, 2)), gen.standard_normal(80)))
    dirs = sample_haar_directions(2, 50, seed=1)
    full = build_slice_matrix(nd, dirs, 5).D
    monkeypatch.setattr(slicing, "_BLOCK", 7)
    assert np.array_equal(full, build_slice_matrix(nd, dirs, 5).D)


def test_consistency_constant_beta(gen):
    b = np.array([1.5, -0.5])
    X = gen.standard_normal((10_000, 2))
    nd = normalize(Dataset(X, X @ b))
    dirs = np.asarray(sample_haar_directions(2, 20, seed=4))
    D = build_slice_matrix(nd, dirs, 1).D
    assert np.max(np.abs(D[0] - dirs @ b)) < 0.05

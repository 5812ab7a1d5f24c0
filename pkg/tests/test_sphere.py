import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.special import ive
from scipy.stats import ortho_group

from rcmsw.errors import InvalidArgumentError
from rcmsw.sphere import (
    project_ball, project_product_ball, sample_haar_directions, sample_vmf,
)


def test_haar_mean_small():
    V = np.asarray(sample_haar_directions(2, 1000, seed=7))
    assert np.linalg.norm(V.mean(axis=0)) < 0.1


def test_haar_single_unit():
    V = np.asarray(sample_haar_directions(3, 1, seed=123))
    assert V.shape == (1, 3)
    assert abs(np.linalg.norm(V[0]) - 1.0) < 1e-12


def test_haar_half_plane_fraction():
    V = np.asarray(sample_haar_directions(2, 100_000, seed=1))
    frac = np.mean(V[:, 0] > 0)
    assert 0.49 <= frac <= 0.51


def test_haar_deterministic_and_unit():
    a = sample_haar_directions(4, 50, seed=99)
    b = sample_haar_directions(4, 50, seed=99)
    assert np.array_equal(a.directions, b.directions)
    assert np.allclose(np.linalg.norm(a.directions, axis=1), 1.0, atol=1e-12)
    c = sample_haar_directions(4, 50, seed=100)
    assert not np.array_equal(a.directions, c.directions)


@pytest.mark.parametrize("d,m", [(1, 5), (3, 0)])
def test_haar_invalid(d, m):
    with pytest.raises(InvalidArgumentError):
        sample_haar_directions(d, m, seed=0)


def test_haar_rotation_invariance():
    m = 100_000
    V = np.asarray(sample_haar_directions(3, m, seed=5))
    Q = ortho_group.rvs(3, random_state=0)
    W = V @ Q.T
    tol = 4 / np.sqrt(m)
    for power in (1, 2):
        assert np.all(np.abs((V**power).mean(axis=0) - (W**power).mean(axis=0)) < tol)


def test_vmf_kappa_zero_uniform():
    x = sample_vmf(2, 5000, 0.0, [1.0, 0.0], seed=3)
    assert np.linalg.norm(x.mean(axis=0)) < 0.05


def test_vmf_concentrated():
    x = sample_vmf(2, 5000, 100.0, [1.0, 0.0], seed=3)
    # mean resultant length A_2(100) = I_1(100) / I_0(100)
    a2 = ive(1, 100.0) / ive(0, 100.0)
    assert a2 > 0.99
    assert x[:, 0].mean() > 0.99
    assert abs(x[:, 0].mean() - a2) < 0.002


def test_vmf_unit_norm_d5():
    mean = np.full(5, 5 ** -0.5)
    x = sample_vmf(5, 2000, 0.1, mean, seed=9)
    assert np.max(np.abs(np.linalg.norm(x, axis=1) - 1.0)) < 1e-12


@pytest.mark.parametrize("d,kappa", [(3, 5.0), (4, 20.0)])
def test_vmf_mean_resultant_matches_bessel_ratio(d, kappa):
    x = sample_vmf(d, 20_000, kappa, np.eye(d)[0], seed=4)
    ad = ive(d / 2, kappa) / ive(d / 2 - 1, kappa)
    assert abs(x[:, 0].mean() - ad) < 0.01


def test_vmf_negative_kappa():
    with pytest.raises(InvalidArgumentError):
        sample_vmf(2, 10, -1.0, [1.0, 0.0], seed=0)


@pytest.mark.parametrize("point,R,expected", [
    ((0.5, 0.0), 1.0, (0.5, 0.0)),
    ((4.0, 0.0), 2.0, (2.0, 0.0)),
    ((3.0, 4.0), 1.0, (0.6, 0.8)),
])
def test_project_ball(point, R, expected):
    assert np.allclose(project_ball(point, R), expected, atol=1e-15)


def test_project_product_ball_examples():
    assert np.allclose(project_product_ball([3, 4, 0.3, 0.4], 2, 2, 1.0), [0.6, 0.8, 0.3, 0.4])
    inside = np.array([0.1, 0.2, -0.3, 0.0, 0.5, 0.5])
    assert np.array_equal(project_product_ball(inside, 3, 2, 1.0), inside)
    one = np.zeros(6)
    one[:2] = (4.0, 0.0)
    out = project_product_ball(one, 3, 2, 2.0)
    assert np.allclose(out, [2.0, 0, 0, 0, 0, 0])
    with pytest.raises(InvalidArgumentError):
        project_product_ball(np.zeros(5), 3, 2, 1.0)


vec = arrays(np.float64, 3, elements=st.floats(-100, 100))


@settings(max_examples=200)
@given(vec, vec, st.floats(0.01, 50))
def test_project_ball_idempotent_and_lipschitz(x, y, R):
    px, py = project_ball(x, R), project_ball(y, R)
    assert np.linalg.norm(px) <= R * (1 + 1e-12)
    assert np.allclose(project_ball(px, R), px, rtol=1e-12, atol=1e-12)
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-9

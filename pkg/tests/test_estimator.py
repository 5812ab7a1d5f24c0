import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from rcmsw.data import Dataset, NormalizedDataset, normalize
from rcmsw.errors import ConditioningError, InvalidArgumentError
from rcmsw.estimator import (
    BallLeastSquares, abcd_step, argsort_stable, bcd_step, default_k, eval_objective,
    fit_abcd, fit_bcd, rank_matched_targets, solve_ball_least_squares,
)
from rcmsw.slicing import build_slice_matrix
from rcmsw.sphere import sample_haar_directions, uniform_ball
from rcmsw.transport import w2_squared_equal
from rcmsw import rng


def test_argsort_examples():
    ra = argsort_stable([3, 1, 2])
    assert list(ra.nu + 1) == [2, 3, 1]
    assert list(ra.nu_inv + 1) == [3, 1, 2]
    assert list(argsort_stable([1, 2, 3]).nu) == [0, 1, 2]
    assert list(argsort_stable([5, 5, 5, 5]).nu) == [0, 1, 2, 3]
    assert np.array_equal(ra.nu_inv[ra.nu], np.arange(3))
    with pytest.raises(InvalidArgumentError):
        argsort_stable([1.0, np.inf])


@pytest.mark.parametrize("n,d,k", [(500, 2, 63), (2000, 2, 159), (1054, 4, 54), (1056, 4, 54),
                                   (1093, 4, 55), (1, 3, 1), (8, 2, 4)])
def test_default_k(n, d, k):
    # 8^(2/3) = 4 exactly; the float power is 3.9999999999999996
    assert default_k(n, d) == k


def objective_by_definition(w, D, V):
    """Loop over directions, rank-match with an explicit inverse permutation."""
    k, m = D.shape
    total = 0.0
    for j in range(m):
        proj = w @ V[j]
        nu_inv = argsort_stable(proj).nu_inv
        total += sum((proj[q] - D[nu_inv[q], j]) ** 2 for q in range(k))
    return total / (m * k)


def test_objective_matches_definition_and_w2(gen):
    w = gen.standard_normal((6, 3))
    V = np.asarray(sample_haar_directions(3, 15, seed=1))
    D = np.sort(gen.standard_normal((6, 15)), axis=0)
    v = eval_objective(w, D, V)
    assert v == pytest.approx(objective_by_definition(w, D, V), rel=1e-12)
    assert v == pytest.approx(np.mean([w2_squared_equal(D[:, j], w @ V[j]) for j in range(15)]), rel=1e-12)
    perm = gen.permutation(6)
    assert eval_objective(w[perm], D, V) == pytest.approx(v, rel=1e-14)


def test_objective_examples():
    V = np.array([[1.0, 0.0]])
    assert eval_objective(np.array([[0.0, 0.0], [2.0, 0.0]]), np.array([[0.0], [2.0]]), V) == 0.0
    p = np.array([[0.3, 0.7]])
    assert eval_objective(p, np.array([[1.1]]), V) == pytest.approx((0.3 - 1.1) ** 2)
    with pytest.raises(InvalidArgumentError):
        eval_objective(np.zeros((2, 2)), np.zeros((3, 1)), V)


def test_objective_full_sample_zero(gen):
    X = gen.standard_normal((20, 2))
    nd = normalize(Dataset(X, gen.standard_normal(20)))
    dirs = sample_haar_directions(2, 30, seed=4)
    D = build_slice_matrix(nd, dirs, 20)
    assert eval_objective(nd.pseudo_points(), D, dirs) == pytest.approx(0.0, abs=1e-12)


def oracle_ball_lsq(L, v, R):
    cons = {"type": "ineq", "fun": lambda u: R**2 - u @ u, "jac": lambda u: -2 * u}
    res = minimize(lambda u: u @ L @ u - 2 * v @ u, np.zeros(len(v)), jac=lambda u: 2 * L @ u - 2 * v,
                   constraints=[cons], method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    return res.x


def test_ball_lsq_examples():
    R = 1.5
    u = solve_ball_least_squares(np.eye(2), np.array([2 * R, 0.0]), 10, R)
    assert np.allclose(u, [R, 0.0], atol=1e-10)
    # grid search over the ball confirms the boundary point
    r = np.linspace(0, R, 301)
    th = np.linspace(0, 2 * np.pi, 721)
    G = np.stack([np.outer(r, np.cos(th)).ravel(), np.outer(r, np.sin(th)).ravel()], axis=1)
    vals = np.einsum("ij,ij->i", G, G) - 2 * G @ np.array([2 * R, 0.0])
    assert np.allclose(G[np.argmin(vals)], [R, 0.0], atol=1e-9)

    m, d = 100, 3
    L = m / d * np.eye(d)
    v = np.array([1.0, 2.0, -3.0])
    assert np.allclose(solve_ball_least_squares(L, v, m, 10.0), d / m * v)
    assert np.array_equal(solve_ball_least_squares(L, np.zeros(d), m, 1.0), np.zeros(d))


def test_ball_lsq_against_slsqp(gen):
    for _ in range(25):
        d = int(gen.integers(2, 5))
        V = np.asarray(sample_haar_directions(d, 20, seed=int(gen.integers(1 << 30))))
        L = V.T @ V
        v = gen.standard_normal(d) * gen.uniform(1, 60)
        R = gen.uniform(0.5, 3)
        u = solve_ball_least_squares(L, v, 20, R)
        ref = oracle_ball_lsq(L, v, R)
        assert np.linalg.norm(u) <= R * (1 + 1e-12)
        f = lambda x: x @ L @ x - 2 * v @ x
        assert f(u) <= f(ref) + 1e-7 * max(1.0, abs(f(ref)))
        assert np.allclose(u, ref, atol=1e-4)
        if np.linalg.norm(np.linalg.solve(L, v)) > R:
            assert abs(np.linalg.norm(u) - R) < 1e-10


def test_ball_lsq_singular():
    with pytest.raises(ConditioningError):
        solve_ball_least_squares(np.array([[1.0, 0.0], [0.0, 0.0]]), np.ones(2), 5, 1.0)
    with pytest.raises(ConditioningError):
        solve_ball_least_squares(np.eye(3), np.ones(3), 2, 1.0)


def test_abcd_single_step_formula():
    c = 0.7
    w = abcd_step(np.array([[0.1, 0.2]]), np.array([[c]]), np.array([[1.0, 0.0]]), 100.0)
    assert np.allclose(w, [[2 * c, 0.0]])


def test_abcd_step_in_ball(gen):
    w = gen.standard_normal((10, 2)) * 20
    V = np.asarray(sample_haar_directions(2, 40, seed=3))
    D = np.sort(gen.standard_normal((10, 40)) * 30, axis=0)
    out = abcd_step(w, D, V, 2.0)
    assert np.all(np.linalg.norm(out, axis=1) <= 2.0 + 1e-12)


def test_rank_matched_targets_definition(gen):
    w = gen.standard_normal((5, 2))
    V = np.asarray(sample_haar_directions(2, 6, seed=9))
    D = np.sort(gen.standard_normal((5, 6)), axis=0)
    C = rank_matched_targets(w, D, V)
    for j in range(6):
        nu_inv = argsort_stable(w @ V[j]).nu_inv
        assert np.array_equal(C[:, j], D[nu_inv, j])


def test_bcd_full_sample_fixed_point(gen):
    X = gen.standard_normal((30, 2))
    nd = normalize(Dataset(X, gen.standard_normal(30)))
    dirs = sample_haar_directions(2, 50, seed=2)
    pc, rep = fit_bcd(nd, dirs, 30, R=10.0, init=nd.pseudo_points())
    assert rep.iterations == 1 and rep.converged
    assert rep.final_objective == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("k", [1, 5, 40])
def test_bcd_descends_constant_beta(gen, k):
    b = np.array([1.0, -2.0])
    X = gen.standard_normal((40, 2))
    nd = normalize(Dataset(X, X @ b))
    pc, rep = fit_bcd(nd, sample_haar_directions(2, 30, seed=5), k, R=5.0, seed=1)
    assert rep.final_objective <= rep.objective_trace[0]


def test_bcd_monotone_and_in_ball(sph_data_500):
    nd, _ = sph_data_500
    pc, rep = fit_bcd(nd, sample_haar_directions(2, 50, seed=3), 42, R=10.0, seed=3, max_iter=20)
    assert np.all(np.diff(rep.objective_trace) <= 1e-10)
    assert np.all(np.linalg.norm(pc.w, axis=1) <= 10.0 + 1e-9)


def test_bcd_finite_termination_small_integer():
    for s in range(20):
        g = rng.stream(s, 1234)
        n, d = 12, 2
        X = g.integers(-3, 4, size=(n, d)).astype(float)
        X[np.all(X == 0, axis=1)] = [1.0, 0.0]
        Y = g.integers(-5, 6, size=n).astype(float)
        nd = normalize(Dataset(X, Y))
        pc, rep = fit_bcd(nd, sample_haar_directions(d, 8, seed=s), 4, R=6.0, seed=s,
                          max_iter=1000, tol=0.0)
        assert rep.converged and rep.iterations < 1000


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_objective_lipschitz(seed):
    g = rng.stream(seed, 55)
    k, d, R = 8, 2, 2.0
    V = np.asarray(sample_haar_directions(d, 20, seed=seed))
    D = np.sort(g.uniform(-R, R, size=(k, 20)), axis=0)
    w1 = uniform_ball(g, k, d, R)
    w2 = uniform_ball(g, k, d, R)
    lhs = abs(eval_objective(w1, D, V) - eval_objective(w2, D, V))
    assert lhs <= 4 * R * k**-0.5 * np.linalg.norm(w1 - w2) + 1e-9


def test_fit_abcd_shape_and_trace(sph_data_500):
    nd, _ = sph_data_500
    pc, rep = fit_abcd(nd, sample_haar_directions(2, 200, seed=1), 30, R=10.0, seed=1, t=5)
    assert pc.w.shape == (30, 2)
    assert len(rep.objective_trace) == 6 and rep.iterations == 5
    assert rep.final_objective == pytest.approx(rep.objective_trace[-1])
    with pytest.raises(InvalidArgumentError):
        fit_abcd(nd, sample_haar_directions(2, 5, seed=1), 30, t=0)


def test_fits_deterministic(sph_data_500):
    nd, _ = sph_data_500
    dirs = sample_haar_directions(2, 100, seed=1)
    a = fit_abcd(nd, dirs, 20, seed=4, t=4)[0].w
    b = fit_abcd(nd, dirs, 20, seed=4, t=4)[0].w
    assert np.array_equal(a, b)
    c = fit_bcd(nd, dirs, 20, seed=4, max_iter=4)[0].w
    assert np.array_equal(c, fit_bcd(nd, dirs, 20, seed=4, max_iter=4)[0].w)


def test_k_out_of_range(sph_data_500):
    nd, _ = sph_data_500
    with pytest.raises(InvalidArgumentError):
        fit_abcd(nd, sample_haar_directions(2, 5, seed=1), 501)

"""Monte Carlo k-NN sliced objective and its two block coordinate descent solvers.

Particles are stored as a ``(k, d)`` array ``w``; the stacked vector of the
product ball is ``w.ravel()``. Directions are an ``(m, d)`` array (or a
:class:`~rcmsw.sphere.DirectionSet`), the slice matrix ``D`` is ``(k, m)``.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import rng as _rng
from .errors import ConditioningError, InvalidArgumentError
from .slicing import SliceMatrix, build_slice_matrix
from .sphere import project_rows, uniform_ball


@dataclass
class ParticleConfig:
    """``k`` particles in the closed ball of radius ``R``; the measure is their uniform mixture."""

    w: np.ndarray
    R: float

    def __array__(self, dtype=None, copy=None):
        return self.w if dtype is None else self.w.astype(dtype)

    @property
    def k(self):
        return self.w.shape[0]

    @property
    def d(self):
        return self.w.shape[1]


@dataclass
class FitReport:
    final_objective: float
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    wall_time: float = 0.0
    # time spent building the slice matrix (included in wall_time)
    setup_time: float = 0.0


@dataclass(frozen=True)
class RankAssignment:
    """Sorting permutation ``nu`` (0-based) and its inverse ``nu_inv``.

    ``a[nu]`` is sorted; ``nu_inv[q]`` is the rank of entry ``q``.
    """

    nu: np.ndarray
    nu_inv: np.ndarray


def argsort_stable(a):
    """Stable argsort; equal entries keep their original order."""
    a = np.asarray(a, dtype=float).ravel()
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError("argsort_stable needs finite entries")
    nu = np.argsort(a, kind="stable")
    nu_inv = np.empty_like(nu)
    nu_inv[nu] = np.arange(a.size)
    return RankAssignment(nu, nu_inv)


def default_k(n, d):
    """Smallest integer ``k`` with ``k >= n**(d / (2d - 1))``, capped at ``n``."""
    e_num, e_den = d, 2 * d - 1
    target = n**e_num
    k = max(1, math.ceil(n ** (e_num / e_den)))
    # exact integer correction of the floating-point ceiling
    while k > 1 and (k - 1) ** e_den >= target:
        k -= 1
    while k**e_den < target:
        k += 1
    return min(k, n)


def _slice_array(D):
    return D.D if isinstance(D, SliceMatrix) else np.asarray(D, dtype=float)


def _particles(w):
    return w.w if isinstance(w, ParticleConfig) else np.asarray(w, dtype=float)


def _check_shapes(w, D, V):
    if w.ndim != 2 or D.ndim != 2 or V.ndim != 2:
        raise InvalidArgumentError("particles, slice matrix and directions must be 2-D")
    if w.shape[1] != V.shape[1]:
        raise InvalidArgumentError(f"particle dimension {w.shape[1]} != direction dimension {V.shape[1]}")
    if D.shape != (w.shape[0], V.shape[0]):
        raise InvalidArgumentError(
            f"slice matrix has shape {D.shape}, expected (k, m) = ({w.shape[0]}, {V.shape[0]})"
        )


def rank_matched_targets(w, D, V):
    """``C[q, j] = D[nu_j^{-1}(q), j]``: the slice entry matched to particle ``q`` on ``V_j``."""
    k, m = D.shape
    proj = w @ V.T
    order = np.argsort(proj, axis=0, kind="stable")
    ranks = np.empty_like(order)
    cols = np.arange(m)
    ranks[order, cols[None, :]] = np.arange(k)[:, None]
    return D[ranks, cols[None, :]]


def eval_objective(pc, D, dirs):
    """Monte Carlo objective: mean over directions of W2^2 between ``D[:, j]`` and ``w @ V_j``."""
    w = _particles(pc)
    D = _slice_array(D)
    V = np.asarray(dirs, dtype=float)
    _check_shapes(w, D, V)
    proj = np.sort(w @ V.T, axis=0)
    return float(np.mean((proj - D) ** 2))


class BallLeastSquares:
    """Minimizer of ``U^T L U - 2 v^T U`` over ``|U| <= R`` for a fixed SPD ``L``.

    ``L`` is eigendecomposed once; each solve is then a diagonal problem. If the
    unconstrained solution ``L^{-1} v`` leaves the ball, the multiplier
    ``lam > 0`` with ``|(L + lam I)^{-1} v| = R`` is found by Brent's method on
    the monotone map ``lam -> |(L + lam I)^{-1} v| - R``.
    """

    def __init__(self, L, R, rcond=1e-12):
        L = np.asarray(L, dtype=float)
        if L.ndim != 2 or L.shape[0] != L.shape[1]:
            raise InvalidArgumentError("L must be a square matrix")
        if R <= 0:
            raise InvalidArgumentError(f"R must be positive, got {R}")
        evals, Q = np.linalg.eigh(0.5 * (L + L.T))
        if not np.all(np.isfinite(evals)) or evals[0] <= rcond * max(evals[-1], 0.0):
            raise ConditioningError(
                f"L is singular or ill-conditioned (eigenvalues {evals[0]:.3g} .. {evals[-1]:.3g})"
            )
        self.evals = evals
        self.Q = Q
        self.R = float(R)

    def _radius(self, c, lam):
        return math.sqrt(float(np.sum((c / (self.evals + lam)) ** 2)))

    def solve(self, v):
        v = np.asarray(v, dtype=float)
        if v.ndim == 1:
            return self.solve(v[None, :])[0]
        C = v @ self.Q
        U = C / self.evals
        norms = np.linalg.norm(U, axis=1)
        R = self.R
        for q in np.flatnonzero(norms > R):
            c = C[q]
            hi = float(np.linalg.norm(c)) / R
            lam = brentq(lambda s: self._radius(c, s) - R, 0.0, hi,
                         xtol=1e-15 * max(1.0, hi), rtol=4 * np.finfo(float).eps)
            u = c / (self.evals + lam)
            nrm = float(np.linalg.norm(u))
            if nrm > R:
                u *= R / nrm
            U[q] = u
        return U @ self.Q.T


def solve_ball_least_squares(L, v, m, R):
    """Solve ``argmin_{|U| <= R} (U - L^{-1} v)^T L (U - L^{-1} v) / m``.

    Raises :class:`ConditioningError` when ``L`` is singular, e.g. ``m < d``.
    """
    L = np.asarray(L, dtype=float)
    if m < L.shape[0]:
        raise ConditioningError(f"m = {m} directions cannot span dimension {L.shape[0]}")
    return BallLeastSquares(L, R).solve(v)


def bcd_step(w, D, dirs, R, solver=None):
    """One exact block coordinate descent update from particles ``w``."""
    w = _particles(w)
    D = _slice_array(D)
    V = np.asarray(dirs, dtype=float)
    _check_shapes(w, D, V)
    if solver is None:
        if V.shape[0] < V.shape[1]:
            raise ConditioningError(f"m = {V.shape[0]} directions cannot span dimension {V.shape[1]}")
        solver = BallLeastSquares(V.T @ V, R)
    C = rank_matched_targets(w, D, V)
    return solver.solve(C @ V)


def abcd_step(w, D, dirs, R):
    """One approximate update: ``(d/m) sum_j C[q, j] V_j`` then blockwise ball projection."""
    w = _particles(w)
    D = _slice_array(D)
    V = np.asarray(dirs, dtype=float)
    _check_shapes(w, D, V)
    m, d = V.shape
    C = rank_matched_targets(w, D, V)
    return project_rows((d / m) * (C @ V), R)


def _prepare(nd, dirs, k, R, seed, init, D):
    if R <= 0:
        raise InvalidArgumentError(f"R must be positive, got {R}")
    V = np.asarray(dirs, dtype=float)
    t0 = time.perf_counter()
    if D is None:
        D = build_slice_matrix(nd, V, k)
    D = _slice_array(D)
    setup = time.perf_counter() - t0
    if D.shape[0] != k:
        raise InvalidArgumentError(f"slice matrix has {D.shape[0]} rows, expected k = {k}")
    if init is None:
        w = uniform_ball(_rng.stream(seed, _rng.INIT), k, V.shape[1], R)
    else:
        w = np.array(_particles(init), dtype=float)
        if w.shape != (k, V.shape[1]):
            raise InvalidArgumentError(f"init has shape {w.shape}, expected {(k, V.shape[1])}")
    return V, D, w, setup


def fit_bcd(nd, dirs, k, R=10.0, seed=0, max_iter=200, tol=1e-9, init=None, D=None):
    """Exact block coordinate descent.

    Alternates between the optimal rank assignment for the current particles
    and the exact minimizer of the resulting separable quadratic over the
    product ball. Stops when the update moves less than ``tol`` (Euclidean norm
    of the stacked vector), when the objective decreases by no more than
    ``tol`` (cycling among equal-objective assignments), or at ``max_iter``.

    Returns
    -------
    (ParticleConfig, FitReport)
    """
    t0 = time.perf_counter()
    V, D, w, setup = _prepare(nd, dirs, k, R, seed, init, D)
    if V.shape[0] < V.shape[1]:
        raise ConditioningError(f"m = {V.shape[0]} directions cannot span dimension {V.shape[1]}")
    solver = BallLeastSquares(V.T @ V, R)
    obj = eval_objective(w, D, V)
    trace = [obj]
    converged = False
    it = 0
    while it < max_iter:
        w_new = bcd_step(w, D, V, R, solver=solver)
        it += 1
        obj_new = eval_objective(w_new, D, V)
        step = float(np.linalg.norm(w_new - w))
        trace.append(obj_new)
        decrease = obj - obj_new
        w, obj = w_new, obj_new
        if step <= tol or decrease <= tol:
            converged = True
            break
    report = FitReport(obj, trace, it, converged, time.perf_counter() - t0, setup)
    return ParticleConfig(w, float(R)), report


def fit_abcd(nd, dirs, k, R=10.0, seed=0, t=20, init=None, D=None):
    """Approximate block coordinate descent: exactly ``t`` closed-form projected updates."""
    if t < 1:
        raise InvalidArgumentError(f"t must be >= 1, got {t}")
    t0 = time.perf_counter()
    V, D, w, setup = _prepare(nd, dirs, k, R, seed, init, D)
    trace = [eval_objective(w, D, V)]
    for _ in range(t):
        w = abcd_step(w, D, V, R)
        trace.append(eval_objective(w, D, V))
    report = FitReport(trace[-1], trace, t, True, time.perf_counter() - t0, setup)
    return ParticleConfig(w, float(R)), report

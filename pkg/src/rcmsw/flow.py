"""Sliced-Wasserstein diffusion sampler: an interacting particle system.

Each step moves every particle along the drift

    v(Q) = -(1/m) sum_j (<Q, V_j> - G_j(F_j(<Q, V_j>))) V_j

where ``F_j`` is the empirical CDF of the current particle projections on
``V_j`` and ``G_j`` the empirical quantile function of slice column ``D[:, j]``,
then adds Gaussian noise of scale ``sqrt(2 lam h)`` (Euler-Maruyama).

Conventions: the CDF is right-continuous, ``F(x) = #{values <= x} / L``; the
quantile of a sorted k-column at level ``p`` is entry ``ceil(p k)`` (1-based),
clamped to ``[1, k]``. With ``L = k`` a particle of rank ``r`` is matched to
entry ``r``, so rank-matched configurations are exact fixed points. For
``L != k`` the composition maps rank ``r`` to entry ``ceil(r k / L)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from .errors import InvalidArgumentError
from .slicing import SliceMatrix, build_slice_matrix
from .sphere import project_rows, uniform_ball


@dataclass(frozen=True)
class FlowConfig:
    L: int = 50
    lam: float = 0.01
    h: float = 1.0
    t: int = 20
    R: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.L < 1:
            raise InvalidArgumentError(f"L must be >= 1, got {self.L}")
        if not self.h > 0:
            raise InvalidArgumentError(f"h must be positive, got {self.h}")
        if self.t < 1:
            raise InvalidArgumentError(f"t must be >= 1, got {self.t}")
        if not self.lam >= 0:
            raise InvalidArgumentError(f"lambda must be >= 0, got {self.lam}")
        if not self.R > 0:
            raise InvalidArgumentError(f"R must be positive, got {self.R}")


@dataclass
class FlowTrace:
    final: np.ndarray
    # (step index, particles) pairs; step 0 is the initialization
    snapshots: list = field(default_factory=list)


def empirical_cdf(values, x):
    """Right-continuous empirical CDF of ``values`` at ``x``."""
    v = np.asarray(values, dtype=float).ravel()
    return float(np.count_nonzero(v <= x)) / v.size


def empirical_quantile(sorted_col, p):
    """Left-continuous empirical quantile of a sorted sample on the ``ceil(p k)`` grid."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"p must lie in [0, 1], got {p}")
    col = np.asarray(sorted_col, dtype=float).ravel()
    k = col.size
    # tolerate rounding in p = r / L before taking the ceiling
    idx = math.ceil(p * k - 1e-9)
    idx = min(max(idx, 1), k)
    return float(col[idx - 1])


def _drift_all(Q, D, V):
    L = Q.shape[0]
    k, m = D.shape
    proj = Q @ V.T
    srt = np.sort(proj, axis=0)
    ranks = np.empty_like(proj, dtype=np.int64)
    for j in range(m):
        ranks[:, j] = np.searchsorted(srt[:, j], proj[:, j], side="right")
    # ceil(r k / L) in exact integer arithmetic, clamped to [1, k]
    idx = np.clip(-((-ranks * k) // L), 1, k) - 1
    target = D[idx, np.arange(m)[None, :]]
    return -((proj - target) @ V) / m


def drift(Q_i, particles, D, dirs):
    """Drift at point ``Q_i`` given the current particle cloud."""
    D = D.D if isinstance(D, SliceMatrix) else np.asarray(D, dtype=float)
    V = np.asarray(dirs, dtype=float)
    P = np.asarray(particles, dtype=float)
    q = np.asarray(Q_i, dtype=float).ravel()
    if P.ndim != 2 or P.shape[1] != V.shape[1] or q.size != V.shape[1]:
        raise InvalidArgumentError("point, particles and directions must share a dimension")
    if D.shape[1] != V.shape[0]:
        raise InvalidArgumentError("slice matrix and directions disagree on m")
    k, m = D.shape
    L = P.shape[0]
    # same elementwise reduction for the cloud and the query point, so a
    # particle's own projection ranks identically in both
    srt = np.sort((P[:, None, :] * V[None]).sum(axis=-1), axis=0)
    x = (q[None, :] * V).sum(axis=-1)
    out = np.zeros(V.shape[1])
    for j in range(m):
        r = int(np.searchsorted(srt[:, j], x[j], side="right"))
        idx = min(max(-((-r * k) // L), 1), k)
        out += (x[j] - D[idx - 1, j]) * V[j]
    return -out / m


def run_flow(nd, dirs, k, cfg, snapshot_every=None, drift_enabled=True, clamp=False,
             init=None, D=None):
    """Run the particle diffusion for ``cfg.t`` steps.

    Particles start uniform in the ball of radius ``cfg.R`` and are not
    projected back during the iteration; ``clamp=True`` projects the final
    positions only. ``drift_enabled=False`` leaves pure Brownian increments
    (used to check the noise scale). Noise for step ``s`` comes from stream
    ``(cfg.seed, NOISE, s)``.
    """
    V = np.asarray(dirs, dtype=float)
    if D is None:
        D = build_slice_matrix(nd, V, k)
    D = D.D if isinstance(D, SliceMatrix) else np.asarray(D, dtype=float)
    d = V.shape[1]
    if init is None:
        Q = uniform_ball(_rng.stream(cfg.seed, _rng.INIT), cfg.L, d, cfg.R)
    else:
        Q = np.array(init, dtype=float)
        if Q.shape != (cfg.L, d):
            raise InvalidArgumentError(f"init has shape {Q.shape}, expected {(cfg.L, d)}")
    snaps = []
    if snapshot_every:
        snaps.append((0, Q.copy()))
    scale = math.sqrt(2.0 * cfg.lam * cfg.h)
    for step in range(1, cfg.t + 1):
        if drift_enabled:
            Q = Q + cfg.h * _drift_all(Q, D, V)
        else:
            Q = Q.copy()
        if scale > 0:
            Q += scale * _rng.stream(cfg.seed, _rng.NOISE, step).standard_normal(Q.shape)
        if snapshot_every and step % snapshot_every == 0:
            snaps.append((step, Q.copy()))
    if clamp:
        Q = project_rows(Q, cfg.R)
    return FlowTrace(Q, snaps)

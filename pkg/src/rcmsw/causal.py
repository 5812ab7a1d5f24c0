"""Treatment-effect distributions from the causal random coefficient model.

Outcomes follow ``Y = <Z, beta_Z> + W R + U`` with random ``(beta_Z, R, U)``.
Writing ``X = (Z, W, 1)`` and ``beta = (beta_Z, R, U)`` turns this into the
linear random coefficient model, so the estimator recovers the law of the
unit-level effect ``R`` as coordinate ``p`` (0-based) of the fitted particles.
A binary treatment violates the covariate support conditions, so the working
model perturbs it with independent ``Cauchy(0, epsilon)`` noise.
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .data import Dataset, normalize
from .errors import DataError, InvalidArgumentError, ParseError
from .estimator import default_k, fit_abcd
from .sphere import sample_haar_directions

PERCENTILES = (5, 25, 50, 75, 95)


@dataclass(frozen=True)
class CausalDataset:
    Z: np.ndarray
    W: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        Z = np.asarray(self.Z, dtype=float)
        if Z.ndim == 1:
            Z = Z[:, None]
        W = np.asarray(self.W, dtype=float).ravel()
        Y = np.asarray(self.Y, dtype=float).ravel()
        n = Z.shape[0]
        if W.size != n or Y.size != n:
            raise DataError("Z, W and Y must have the same number of rows")
        if not (np.isfinite(Z).all() and np.isfinite(W).all() and np.isfinite(Y).all()):
            raise DataError("non-finite value in causal dataset")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self):
        return self.Z.shape[0]

    @property
    def p(self):
        return self.Z.shape[1]


@dataclass(frozen=True)
class CausalConfig:
    epsilon: float = 0.005
    R_ball: float = 10.0
    k: int | None = None
    m: int = 1000
    t: int = 20
    normalize_inputs: bool = True

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidArgumentError(f"epsilon must be positive, got {self.epsilon}")
        if not self.R_ball > 0:
            raise InvalidArgumentError(f"R_ball must be positive, got {self.R_ball}")


@dataclass
class EffectSummary:
    samples: np.ndarray
    percentiles: dict


def nearest_rank(samples, q):
    """Nearest-rank percentile: the ``ceil(q/100 * k)``-th smallest sample (1-based)."""
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    k = s.size
    # integer arithmetic avoids ceil(0.05 * 20) rounding up to 2
    idx = -((-int(round(q * 1000)) * k) // 100000)
    return float(s[min(max(idx, 1), k) - 1])


def standardize(a):
    a = np.asarray(a, dtype=float)
    sd = a.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return (a - a.mean(axis=0)) / sd


def build_design(cd, cfg, seed):
    """Design rows ``(Z_i, W_i + epsilon C_i, 1)`` with ``C_i`` standard Cauchy; ``Y`` unchanged."""
    gen = _rng.as_generator(seed, _rng.CAUCHY)
    u = gen.uniform(size=cd.n)
    cauchy = np.tan(np.pi * (u - 0.5))
    w_eps = cd.W + cfg.epsilon * cauchy
    X = np.column_stack([cd.Z, w_eps, np.ones(cd.n)])
    return Dataset(X, cd.Y)


def estimate_effects(cd, cfg, seed):
    """Fit the working model with approximate BCD and summarize the treatment coordinate.

    With ``normalize_inputs`` the columns of ``Z`` and ``Y`` are standardized
    first (``W`` is left alone), so effects are reported in standard
    deviations of ``Y``.
    """
    if cfg.normalize_inputs:
        cd = CausalDataset(standardize(cd.Z), cd.W, standardize(cd.Y))
    ds = build_design(cd, cfg, _rng.stream(seed, _rng.CAUCHY))
    d = ds.d
    k = cfg.k if cfg.k is not None else default_k(cd.n, d)
    if not 1 <= k <= cd.n:
        raise InvalidArgumentError(f"k must satisfy 1 <= k <= n = {cd.n}, got {k}")
    dirs = sample_haar_directions(d, cfg.m, seed)
    pc, _ = fit_abcd(normalize(ds), dirs, k, cfg.R_ball, seed, t=cfg.t)
    samples = pc.w[:, cd.p].copy()
    return EffectSummary(samples, {q: nearest_rank(samples, q) for q in PERCENTILES})


def read_causal_csv(path, p):
    """Read a CSV with header ``z1,...,zp,w,y``."""
    expected = [f"z{i}" for i in range(1, p + 1)] + ["w", "y"]
    from .data import _read_numeric

    rows = _read_numeric(path, expected)
    if not rows:
        raise ParseError("no data rows", line=2)
    arr = np.array(rows, dtype=float)
    return CausalDataset(arr[:, :p], arr[:, p], arr[:, p + 1])


def write_causal_csv(cd, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow([f"z{i}" for i in range(1, cd.p + 1)] + ["w", "y"])
        for z, w, y in zip(cd.Z, cd.W, cd.Y):
            wr.writerow([format(v, ".17g") for v in (*z, w, y)])


def write_percentiles_csv(summary, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["percentile", "value"])
        for q in PERCENTILES:
            wr.writerow([q, format(summary.percentiles[q], ".17g")])


def synthetic_scenario(n=2000, effect=2.0, beta_z=(1.0, -1.0), seed=0):
    """Randomized trial with standard normal ``Z``, fair binary ``W``, constant coefficients, ``U = 0``."""
    gen = _rng.stream(seed, _rng.COVARIATES)
    bz = np.asarray(beta_z, dtype=float)
    Z = gen.standard_normal((n, bz.size))
    W = gen.integers(0, 2, size=n).astype(float)
    Y = Z @ bz + effect * W
    return CausalDataset(Z, W, Y)

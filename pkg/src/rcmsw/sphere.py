"""Sampling on the unit sphere and Euclidean ball projections."""

from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class DirectionSet:
    """``m`` unit vectors in ``R^d`` stored row-wise, plus the seed that made them.

    ``np.asarray(dirs)`` returns the ``(m, d)`` array, so every function that
    takes directions accepts either a ``DirectionSet`` or a plain array.
    """

    directions: np.ndarray
    seed: int | None = None

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.directions
        return self.directions.astype(dtype)

    def __len__(self):
        return self.directions.shape[0]

    @property
    def m(self):
        return self.directions.shape[0]

    @property
    def d(self):
        return self.directions.shape[1]


def _normal_directions(gen, m, d):
    z = gen.standard_normal((m, d))
    norms = np.linalg.norm(z, axis=1)
    bad = norms == 0.0
    while bad.any():
        z[bad] = gen.standard_normal((int(bad.sum()), d))
        norms[bad] = np.linalg.norm(z[bad], axis=1)
        bad = norms == 0.0
    return z / norms[:, None]


def sample_haar_directions(d, m, seed, stream=_rng.DIRECTIONS):
    """Draw ``m`` i.i.d. directions from the uniform (Haar) law on ``S^{d-1}``.

    Parameters
    ----------
    d : int
        Ambient dimension, at least 2.
    m : int
        Number of directions, at least 1.
    seed : int
        Seed of the counter-based stream; equal ``(seed, stream, d, m)`` give
        bit-identical output.
    stream : int, optional
        Stream id, so that several independent direction sets can share a seed.

    Returns
    -------
    DirectionSet
    """
    if d < 2:
        raise InvalidArgumentError(f"d must be >= 2, got {d}")
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    gen = _rng.stream(seed, stream)
    return DirectionSet(_normal_directions(gen, int(m), int(d)), seed=seed)


def _wood_cosines(gen, kappa, d, n):
    # Wood (1994) rejection sampler for the cosine w = <x, mu>
    dm1 = d - 1.0
    b = dm1 / (np.sqrt(4.0 * kappa**2 + dm1**2) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + dm1 * np.log(1.0 - x0**2)
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        batch = max(16, int(need * 1.5))
        z = gen.beta(dm1 / 2.0, dm1 / 2.0, size=batch)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = gen.uniform(size=batch)
        ok = kappa * w + dm1 * np.log(1.0 - x0 * w) - c >= np.log(u)
        acc = w[ok][:need]
        out[filled:filled + acc.size] = acc
        filled += acc.size
    return out


def sample_vmf(d, n, kappa, mean_dir, seed):
    """Sample ``n`` points from the von Mises-Fisher law on ``S^{d-1}``.

    Uses the tangent-normal decomposition: the cosine with ``mean_dir`` is
    drawn by Wood's rejection scheme, the tangent part uniformly on the
    great subsphere orthogonal to ``mean_dir``. ``kappa = 0`` is uniform.

    Returns an ``(n, d)`` array of unit rows.
    """
    if kappa < 0:
        raise InvalidArgumentError(f"kappa must be >= 0, got {kappa}")
    mu = np.asarray(mean_dir, dtype=float).ravel()
    if mu.size != d:
        raise InvalidArgumentError(f"mean_dir has length {mu.size}, expected {d}")
    if d < 2:
        raise InvalidArgumentError(f"d must be >= 2, got {d}")
    norm = np.linalg.norm(mu)
    if abs(norm - 1.0) > 1e-9:
        raise InvalidArgumentError("mean_dir must be a unit vector")
    mu = mu / norm
    gen = _rng.as_generator(seed, _rng.COVARIATES)
    w = _wood_cosines(gen, float(kappa), d, int(n))

    tangent = gen.standard_normal((int(n), d))
    tangent -= np.outer(tangent @ mu, mu)
    tn = np.linalg.norm(tangent, axis=1)
    while np.any(tn == 0.0):
        bad = tn == 0.0
        t = gen.standard_normal((int(bad.sum()), d))
        t -= np.outer(t @ mu, mu)
        tangent[bad] = t
        tn = np.linalg.norm(tangent, axis=1)
    tangent /= tn[:, None]

    x = w[:, None] * mu + np.sqrt(np.clip(1.0 - w**2, 0.0, None))[:, None] * tangent
    return x / np.linalg.norm(x, axis=1)[:, None]


def uniform_ball(gen, count, d, R):
    """``count`` points uniform in the closed ball of radius ``R`` (direction x R u^{1/d})."""
    dirs = _normal_directions(gen, count, d)
    radii = R * gen.uniform(size=count) ** (1.0 / d)
    return dirs * radii[:, None]


def project_ball(point, R):
    """Euclidean projection of ``point`` onto the closed ball of radius ``R`` at 0."""
    if R <= 0:
        raise InvalidArgumentError(f"R must be positive, got {R}")
    p = np.asarray(point, dtype=float)
    nrm = np.linalg.norm(p)
    if nrm <= R:
        return p.copy()
    return p * (R / nrm)


def project_rows(points, R):
    """Row-wise :func:`project_ball` of an ``(k, d)`` array."""
    p = np.asarray(points, dtype=float)
    nrm = np.linalg.norm(p, axis=1)
    scale = np.ones_like(nrm)
    out = nrm > R
    scale[out] = R / nrm[out]
    return p * scale[:, None]


def project_product_ball(stacked, k, d, R):
    """Project a stacked vector of ``k`` blocks of length ``d`` onto the product of balls.

    The projection onto a product set decomposes into independent blockwise
    projections.
    """
    if R <= 0:
        raise InvalidArgumentError(f"R must be positive, got {R}")
    s = np.asarray(stacked, dtype=float).ravel()
    if s.size != k * d:
        raise InvalidArgumentError(f"stacked has length {s.size}, expected k*d = {k * d}")
    return project_rows(s.reshape(k, d), R).ravel()

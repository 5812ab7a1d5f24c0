"""One-dimensional W2 between equal-size samples and Monte Carlo sliced W2."""

import numpy as np

from .errors import InvalidArgumentError


def w2_squared_equal(a, b):
    """Squared 2-Wasserstein distance between two uniform k-point measures on the line.

    The optimal coupling matches order statistics, so this is
    ``mean((sort(a) - sort(b))**2)``.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise InvalidArgumentError(f"sample sizes differ: {a.size} != {b.size}")
    if a.size == 0:
        raise InvalidArgumentError("samples must be non-empty")
    diff = np.sort(a) - np.sort(b)
    return float(np.mean(diff * diff))


def sliced_w2_squared(A, B, dirs):
    """Direction average of :func:`w2_squared_equal` over projected clouds."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    V = np.asarray(dirs, dtype=float)
    if A.ndim != 2 or B.ndim != 2:
        raise InvalidArgumentError("point clouds must be 2-D arrays")
    if A.shape[0] != B.shape[0]:
        raise InvalidArgumentError(f"clouds have different sizes {A.shape[0]} and {B.shape[0]}")
    if A.shape[1] != V.shape[1] or B.shape[1] != V.shape[1]:
        raise InvalidArgumentError("point dimension does not match the directions")
    pa = np.sort(A @ V.T, axis=0)
    pb = np.sort(B @ V.T, axis=0)
    per_dir = np.mean((pa - pb) ** 2, axis=0)
    # fixed-order (ascending j) reduction
    return float(np.add.reduce(per_dir) / per_dir.size)


def sw2_point_clouds(A, B, dirs):
    """Monte Carlo sliced 2-Wasserstein distance between equal-size point clouds."""
    return float(np.sqrt(sliced_w2_squared(A, B, dirs)))


def w2_squared_uniform(a, b):
    """Squared W2 between uniform empirical measures of possibly different sizes.

    Exact: integrates ``(F_a^{-1}(u) - F_b^{-1}(u))**2`` over ``u`` in ``[0, 1]``
    on the merged breakpoint grid ``{i / len(a)} U {j / len(b)}``. Reduces to
    :func:`w2_squared_equal` when the sizes agree.
    """
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise InvalidArgumentError("samples must be non-empty")
    return float(_w2_uniform_cols(a[:, None], b[:, None])[0])


def _w2_uniform_cols(pa, pb):
    # pa: (N, m) and pb: (M, m), each column sorted
    N, M = pa.shape[0], pb.shape[0]
    # breakpoints in integer units of 1 / (N M)
    cuts = np.union1d(np.arange(1, N + 1) * M, np.arange(1, M + 1) * N)
    lo = np.concatenate(([0], cuts[:-1]))
    widths = (cuts - lo) / (N * M)
    ia = lo // M
    ib = lo // N
    diff = pa[ia] - pb[ib]
    return widths @ (diff * diff)


def sliced_w2_uniform(A, B, dirs):
    """Monte Carlo sliced W2 between uniform point clouds of any sizes."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    V = np.asarray(dirs, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != V.shape[1] or B.shape[1] != V.shape[1]:
        raise InvalidArgumentError("point dimension does not match the directions")
    pa = np.sort(A @ V.T, axis=0)
    pb = np.sort(B @ V.T, axis=0)
    per_dir = _w2_uniform_cols(pa, pb)
    return float(np.sqrt(np.add.reduce(per_dir) / per_dir.size))

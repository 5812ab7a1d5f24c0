"""Per-direction k-nearest-neighbour selection and the sorted slice matrix."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

# directions processed per block; bounds the (block, n) distance matrix
_BLOCK = 2048


@dataclass(frozen=True)
class SliceMatrix:
    """``k x m`` matrix whose column ``j`` holds the sorted k-NN pseudo-projections on ``V_j``."""

    D: np.ndarray

    @property
    def k(self):
        return self.D.shape[0]

    @property
    def m(self):
        return self.D.shape[1]


def _check_k(k, n):
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k must satisfy 1 <= k <= n = {n}, got k = {k}")


def _knn_block(Xt, sq_norms, V, k):
    # squared distances |x|^2 + |v|^2 - 2<x, v>; ties on exact duplicates stay exact
    dist = sq_norms[None, :] + np.einsum("ij,ij->i", V, V)[:, None] - 2.0 * (V @ Xt.T)
    # stable sort breaks ties at the k-th distance by ascending row index
    return np.argsort(dist, axis=1, kind="stable")[:, :k]


def knn_indices(Xt, V, k):
    """Indices of the ``k`` rows of ``Xt`` closest to direction ``V``, nearest first.

    Ties are broken by ascending row index.
    """
    Xt = np.asarray(Xt, dtype=float)
    _check_k(k, Xt.shape[0])
    V = np.asarray(V, dtype=float).reshape(1, -1)
    sq = np.einsum("ij,ij->i", Xt, Xt)
    return _knn_block(Xt, sq, V, k)[0]


def build_slice_matrix(nd, dirs, k):
    """Build the slice matrix for a normalized dataset.

    Column ``j`` is ``sort(Yt[i] * <V_j, Xt[i]>)`` over the ``k`` nearest
    neighbours ``i`` of ``V_j`` among the rows of ``Xt``.
    """
    Xt, Yt = nd.Xt, nd.Yt
    _check_k(k, Xt.shape[0])
    V = np.asarray(dirs, dtype=float)
    if V.ndim != 2 or V.shape[1] != Xt.shape[1]:
        raise InvalidArgumentError("directions do not match the covariate dimension")
    m = V.shape[0]
    sq = np.einsum("ij,ij->i", Xt, Xt)
    D = np.empty((m, k))
    for lo in range(0, m, _BLOCK):
        Vb = V[lo:lo + _BLOCK]
        idx = _knn_block(Xt, sq, Vb, k)
        vals = Yt[idx] * np.einsum("bkd,bd->bk", Xt[idx], Vb)
        vals.sort(axis=1)
        D[lo:lo + _BLOCK] = vals
    return SliceMatrix(np.ascontiguousarray(D.T))

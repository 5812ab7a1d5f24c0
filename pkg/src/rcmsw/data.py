"""Observation containers, CSV input/output, and sphere normalization."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, InvalidArgumentError, ParseError

# rows with a smaller norm are treated as zero
ZERO_NORM = 1e-300


@dataclass(frozen=True)
class Dataset:
    """Raw observations: covariates ``X`` of shape ``(n, d)`` and responses ``Y``."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float).ravel()
        if X.ndim != 2:
            raise DataError("X must be a 2-D array")
        n, d = X.shape
        if n < 1:
            raise DataError("dataset is empty")
        if d < 2:
            raise DataError(f"need d >= 2 covariates, got {d}")
        if Y.shape[0] != n:
            raise DataError(f"X has {n} rows but Y has {Y.shape[0]} entries")
        bad = ~(np.isfinite(X).all(axis=1) & np.isfinite(Y))
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise DataError(f"non-finite value in row {row}", row=row)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class NormalizedDataset:
    """Covariates projected onto the unit sphere with rescaled responses.

    ``Xt[i] = X[i] / |X[i]|`` and ``Yt[i] = Y[i] / |X[i]|``, so under the
    linear model ``Yt[i] = <beta_i, Xt[i]>``.
    """

    Xt: np.ndarray
    Yt: np.ndarray

    @property
    def n(self):
        return self.Xt.shape[0]

    @property
    def d(self):
        return self.Xt.shape[1]

    def pseudo_points(self):
        """The points ``Yt[i] * Xt[i]``; their projection on ``V`` is the k-NN slice value."""
        return self.Yt[:, None] * self.Xt


def normalize(ds):
    """Normalize a :class:`Dataset` onto the sphere; zero-norm rows raise ``DataError``."""
    X = ds.X
    norms = np.sqrt(np.einsum("ij,ij->i", X, X))
    zero = norms < ZERO_NORM
    if zero.any():
        row = int(np.flatnonzero(zero)[0])
        raise DataError(f"row {row} of X has zero norm", row=row)
    return NormalizedDataset(X / norms[:, None], ds.Y / norms)


def _parse_float(cell, line):
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r}", line=line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {cell!r}", line=line)
    return v


def read_csv(path, d):
    """Read observations from a CSV with header ``x1,...,xd,y``.

    Raises
    ------
    ParseError
        On a header that does not match ``d``, a wrong cell count, a
        non-numeric or non-finite cell. The message names the line.
    """
    expected = [f"x{i}" for i in range(1, d + 1)] + ["y"]
    rows = _read_numeric(path, expected)
    if not rows:
        raise ParseError("no data rows", line=2)
    arr = np.array(rows, dtype=float)
    return Dataset(arr[:, :d], arr[:, d])


def _read_numeric(path, expected):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty", line=1) from None
        header = [h.strip() for h in header]
        if header != expected:
            missing = [c for c in expected if c not in header]
            what = f"missing column(s) {', '.join(missing)}" if missing else "unexpected columns"
            raise ParseError(
                f"header {','.join(header)} does not match {','.join(expected)} ({what})",
                line=1,
            )
        rows = []
        for line_no, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(expected):
                raise ParseError(f"expected {len(expected)} fields, got {len(rec)}", line=line_no)
            rows.append([_parse_float(c.strip(), line_no) for c in rec])
    return rows


def write_points_csv(points, path, prefix="w"):
    """Write points with header ``w1,...,wd``, 17 significant digits per value."""
    pts = [np.asarray(p, dtype=float).ravel() for p in points]
    if isinstance(points, np.ndarray) and points.ndim == 2:
        dim = points.shape[1]
    elif pts:
        dim = pts[0].size
    else:
        dim = 0
    if any(p.size != dim for p in pts):
        raise InvalidArgumentError("points have mixed dimensions")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(f"{prefix}{i}" for i in range(1, dim + 1)) + "\n")
        for p in pts:
            fh.write(",".join(format(v, ".17g") for v in p) + "\n")


def read_points_csv(path, prefix="w"):
    """Inverse of :func:`write_points_csv`; returns an ``(N, d)`` array."""
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline().strip()
    cols = header.split(",") if header else []
    rows = _read_numeric(path, cols) if cols else []
    return np.array(rows, dtype=float).reshape(len(rows), len(cols))

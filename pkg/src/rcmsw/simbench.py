"""Synthetic coefficient laws, data generation and the simulation benchmark."""

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as _rng
from .data import Dataset, normalize
from .errors import InvalidArgumentError
from .estimator import default_k, fit_abcd, fit_bcd
from .flow import FlowConfig, run_flow
from .sphere import _normal_directions, sample_haar_directions, sample_vmf, uniform_ball
from .transport import sliced_w2_uniform, sw2_point_clouds

LAWS = ("sph", "deg", "dis")
ALGORITHMS = ("bcd", "abcd", "flow")
METRICS = ("full", "subsample")
# default direction counts per algorithm
DEFAULT_M = {"bcd": 50, "abcd": 1000, "flow": 50}
EVAL_DIRECTIONS = 100


@dataclass(frozen=True)
class CoefficientLaw:
    """Two-cluster uniform laws centred at ``+-(R/2) e_2`` and the 2d-point law ``+-(R/2) e_i``.

    ``sph``: uniform in the balls of radius ``R/4`` around the centres;
    ``deg``: uniform on the spheres of radius ``R/4``;
    ``dis``: uniform on the ``2d`` points ``+-(R/2) e_i``.
    """

    kind: str
    d: int
    R: float = 10.0

    def __post_init__(self):
        if self.kind not in LAWS:
            raise InvalidArgumentError(f"unknown law {self.kind!r}; expected one of {LAWS}")
        if self.d < 2:
            raise InvalidArgumentError(f"d must be >= 2, got {self.d}")


def sample_coefficients(law, n, seed):
    gen = _rng.as_generator(seed, _rng.COEFFICIENTS)
    d, R = law.d, law.R
    if law.kind == "dis":
        axis = gen.integers(0, d, size=n)
        sign = np.where(gen.integers(0, 2, size=n) == 1, 1.0, -1.0)
        out = np.zeros((n, d))
        out[np.arange(n), axis] = sign * (R / 2.0)
        return out
    sign = np.where(gen.integers(0, 2, size=n) == 1, 1.0, -1.0)
    centres = np.zeros((n, d))
    centres[:, 1] = sign * (R / 2.0)
    if law.kind == "sph":
        offsets = uniform_ball(gen, n, d, R / 4.0)
    else:
        offsets = _normal_directions(gen, n, d) * (R / 4.0)
    return centres + offsets


def generate_dataset(law, n, d=None, vmf_kappa=0.1, seed=0):
    """Covariates ~ vMF(mean (d^{-1/2}, ...), kappa) on the sphere, ``Y_i = <beta_i, X_i>``.

    Returns ``(Dataset, betas)``.
    """
    if d is None:
        d = law.d
    if d != law.d:
        raise InvalidArgumentError(f"d = {d} does not match law dimension {law.d}")
    mean = np.full(d, 1.0 / np.sqrt(d))
    X = sample_vmf(d, n, vmf_kappa, mean, _rng.stream(seed, _rng.COVARIATES))
    betas = sample_coefficients(law, n, _rng.stream(seed, _rng.COEFFICIENTS))
    Y = np.einsum("ij,ij->i", betas, X)
    return Dataset(X, Y), betas


@dataclass(frozen=True)
class ExperimentSpec:
    law: CoefficientLaw
    n: int
    algorithm: str = "abcd"
    k: int | None = None
    m: int | None = None
    t: int = 20
    reps: int = 20
    seed: int = 0
    vmf_kappa: float = 0.1
    lam: float = 0.01
    h: float = 1.0
    L: int | None = None
    # "full": output vs all n true coefficients (unequal-size transport);
    # "subsample": output vs a size-matched random subset of them
    metric: str = "full"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise InvalidArgumentError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        if self.algorithm not in ALGORITHMS:
            raise InvalidArgumentError(f"unknown algorithm {self.algorithm!r}")
        if self.reps < 1:
            raise InvalidArgumentError("reps must be >= 1")
        if self.k is not None and not 1 <= self.k <= self.n:
            raise InvalidArgumentError(f"k must satisfy 1 <= k <= n = {self.n}, got {self.k}")

    def resolved(self):
        """Copy with ``k``, ``m`` and ``L`` filled in from the defaults."""
        k = self.k if self.k is not None else default_k(self.n, self.law.d)
        m = self.m if self.m is not None else DEFAULT_M[self.algorithm]
        L = self.L if self.L is not None else k
        return replace(self, k=k, m=m, L=L)


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    mean_distance: float
    mean_time: float
    per_rep: list = field(default_factory=list)
    outputs: list = field(default_factory=list)


def run_replicate(spec, rep):
    """One replicate: returns ``(distance, seconds, output points, true betas)``.

    ``spec`` must be resolved. Everything random is keyed by ``(seed, REPLICATE, rep)``.
    """
    law, n, d = spec.law, spec.n, spec.law.d
    base = _rng.stream(spec.seed, _rng.REPLICATE, rep).integers(0, 2**63)
    ds, betas = generate_dataset(law, n, d, spec.vmf_kappa, base)
    nd = normalize(ds)
    dirs = sample_haar_directions(d, spec.m, base, stream=_rng.DIRECTIONS)
    t0 = time.perf_counter()
    if spec.algorithm == "bcd":
        pc, _ = fit_bcd(nd, dirs, spec.k, law.R, base, max_iter=spec.t, tol=1e-9)
        out = pc.w
    elif spec.algorithm == "abcd":
        pc, _ = fit_abcd(nd, dirs, spec.k, law.R, base, t=spec.t)
        out = pc.w
    else:
        cfg = FlowConfig(L=spec.L, lam=spec.lam, h=spec.h, t=spec.t, R=law.R, seed=base)
        out = run_flow(nd, dirs, spec.k, cfg).final
    elapsed = time.perf_counter() - t0
    eval_dirs = sample_haar_directions(d, EVAL_DIRECTIONS, base, stream=_rng.EVAL_DIRECTIONS)
    if spec.metric == "full":
        dist = sliced_w2_uniform(betas, out, eval_dirs)
    else:
        sub = _rng.stream(base, _rng.SUBSAMPLE).choice(n, size=out.shape[0], replace=False)
        dist = sw2_point_clouds(betas[sub], out, eval_dirs)
    return dist, elapsed, out, betas


def run_experiment(spec, threads=1, keep_outputs=False):
    """Run ``spec.reps`` independent replicates and average distance and fit time.

    Replicates may run on ``threads`` workers; results are collected in
    replicate order so the report does not depend on scheduling.
    """
    spec = spec.resolved()
    if spec.metric == "subsample" and spec.algorithm == "flow" and spec.L > spec.n:
        raise InvalidArgumentError("L may not exceed n (true coefficients are subsampled to L)")
    reps = range(spec.reps)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: run_replicate(spec, r), reps))
    else:
        results = [run_replicate(spec, r) for r in reps]
    per_rep = [(r[0], r[1]) for r in results]
    dists = np.array([p[0] for p in per_rep])
    times = np.array([p[1] for p in per_rep])
    outputs = [(r[2], r[3]) for r in results] if keep_outputs else []
    return ExperimentReport(spec, float(dists.mean()), float(times.mean()), per_rep, outputs)


TABLE_COLUMNS = ["algorithm", "law", "d", "n", "k", "m", "t", "reps", "mean_distance", "mean_time"]


def emit_table(reports, path, timing=True):
    """Write reports as CSV; ``timing=False`` writes 0 for the wall-clock column."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(TABLE_COLUMNS)
        for rep in reports:
            s = rep.spec
            wr.writerow([
                s.algorithm, s.law.kind, s.law.d, s.n, s.k, s.m, s.t, s.reps,
                format(rep.mean_distance, ".17g"),
                format(rep.mean_time if timing else 0.0, ".17g"),
            ])


def read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for key in ("d", "n", "k", "m", "t", "reps"):
            r[key] = int(r[key])
        for key in ("mean_distance", "mean_time"):
            r[key] = float(r[key])
    return rows


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]


def emit_scatter_svg(point_sets, path, R=10.0, labels=None, size=480, radius=2.0):
    """Static SVG scatter of one or more point sets on the fixed viewport ``[-R, R]^2``.

    Only the first two coordinates are drawn. Each set gets its own fill colour.
    """
    def sx(x):
        return (x + R) / (2 * R) * size

    def sy(y):
        return size - (y + R) / (2 * R) * size

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>',
        f'<line x1="0" y1="{sy(0):.2f}" x2="{size}" y2="{sy(0):.2f}" stroke="#cccccc"/>',
        f'<line x1="{sx(0):.2f}" y1="0" x2="{sx(0):.2f}" y2="{size}" stroke="#cccccc"/>',
    ]
    for i, pts in enumerate(point_sets):
        pts = np.asarray(pts, dtype=float)
        colour = _PALETTE[i % len(_PALETTE)]
        name = labels[i] if labels else f"series{i}"
        parts.append(f'<g class="series" id="{name}" fill="{colour}" fill-opacity="0.6">')
        for p in pts:
            parts.append(f'<circle cx="{sx(p[0]):.2f}" cy="{sy(p[1]):.2f}" r="{radius}"/>')
        parts.append("</g>")
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")

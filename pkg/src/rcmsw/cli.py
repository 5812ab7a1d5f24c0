"""Command-line driver: ``rcmsw {estimate,simulate,flow,causal}``.

Every run writes a ``manifest.csv`` (``key,value`` rows) holding the fully resolved configuration.
``--from-manifest PATH`` replays it; only ``--out`` and ``--threads`` may
change on replay, and neither affects the artifact bytes.

Exit codes: 0 success, 2 bad arguments, 3 data errors, 4 numerical failure.
"""

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import rng as _rng
from .causal import CausalConfig, estimate_effects, nearest_rank, read_causal_csv, write_percentiles_csv
from .causal import PERCENTILES, EffectSummary
from .data import normalize, read_csv, write_points_csv
from .errors import ConditioningError, DataError, InvalidArgumentError
from .estimator import default_k, fit_abcd, fit_bcd
from .flow import FlowConfig, run_flow
from .simbench import (
    ALGORITHMS, LAWS, METRICS, CoefficientLaw, ExperimentSpec,
    emit_scatter_svg, emit_table, generate_dataset, run_experiment,
)
from .sphere import sample_haar_directions

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
MANIFEST = "manifest.csv"


class UsageError(Exception):
    pass


def _table1(d, algo):
    return {"law": "sph", "d": d, "n": 500, "algo": algo}


def _table2(law, n):
    return {"law": law, "d": 2, "n": n, "algo": "abcd"}


SIM_PRESETS = {}
for _d in (2, 3, 4, 5):
    for _a in ALGORITHMS:
        SIM_PRESETS[f"table1-d{_d}-{_a}"] = _table1(_d, _a)
for _law in LAWS:
    for _n in (500, 1000, 1500, 2000):
        SIM_PRESETS[f"table2-{_law}-n{_n}"] = _table2(_law, _n)
SIM_PRESETS["fig1-bcd"] = {"law": "sph", "d": 2, "n": 2000, "algo": "bcd", "k": 159, "m": 50}
SIM_PRESETS["fig1-abcd"] = {"law": "sph", "d": 2, "n": 2000, "algo": "abcd", "k": 159, "m": 1000}
SIM_PRESETS["fig1-flow"] = {"law": "sph", "d": 2, "n": 2000, "algo": "flow", "L": 159, "m": 10}

FLOW_PRESETS = {
    "fig2": {"n": 2000, "m": 10, "t": 20, "h": 1.0, "L": [20], "lam": [0.01, 0.02, 0.04, 0.08]},
    "fig2-particles": {"n": 2000, "m": 10, "t": 20, "h": 1.0, "L": [10, 20, 40, 80], "lam": [0.01]},
}


# ---------------------------------------------------------------- helpers

def _map(fn, items, threads):
    items = list(items)
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _write_manifest(out, command, config, artifacts):
    # key,value rows; values are JSON so None, lists and types survive replay
    rows = [
        ("tool", "rcmsw"),
        ("version", __version__),
        ("command", command),
        ("artifacts", sorted(artifacts + [MANIFEST])),
    ]
    rows += [(f"config.{key}", config[key]) for key in sorted(config)]
    with open(os.path.join(out, MANIFEST), "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["key", "value"])
        for key, value in rows:
            wr.writerow([key, json.dumps(value)])


def _load_manifest(path, command):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != ["key", "value"]:
            raise ValueError("missing key,value header")
        entries = {key: json.loads(value) for key, value in rows[1:]}
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read manifest {path}: {exc}") from None
    if entries.get("command") != command:
        raise UsageError(f"manifest is for {entries.get('command')!r}, not {command!r}")
    return {key[7:]: value for key, value in entries.items() if key.startswith("config.")}


def _positive(name, value):
    if value is not None and not value > 0:
        raise UsageError(f"--{name} must be positive, got {value}")


def _fmt(v):
    return format(float(v), ".17g")


# ---------------------------------------------------------------- estimate

def _estimate_config(a):
    if a.data is None or a.d is None:
        raise UsageError("estimate requires --data and --d")
    _positive("radius", a.radius)
    _positive("m", a.m)
    _positive("iters", a.iters)
    if a.tol < 0:
        raise UsageError("--tol must be >= 0")
    return {
        "data": a.data, "d": a.d, "algo": a.algo, "k": a.k, "m": a.m, "iters": a.iters,
        "radius": a.radius, "seed": a.seed, "tol": a.tol, "timing": not a.no_timing,
    }


def run_estimate(cfg, out, threads):
    ds = read_csv(cfg["data"], cfg["d"])
    k = cfg["k"] if cfg["k"] is not None else default_k(ds.n, ds.d)
    if not 1 <= k <= ds.n:
        raise UsageError(f"--k must satisfy 1 <= k <= n = {ds.n}, got {k}")
    cfg = dict(cfg, k=k, n=ds.n)
    nd = normalize(ds)
    dirs = sample_haar_directions(ds.d, cfg["m"], cfg["seed"])
    if cfg["algo"] == "bcd":
        pc, rep = fit_bcd(nd, dirs, k, cfg["radius"], cfg["seed"], max_iter=cfg["iters"], tol=cfg["tol"])
    else:
        pc, rep = fit_abcd(nd, dirs, k, cfg["radius"], cfg["seed"], t=cfg["iters"])
    os.makedirs(out, exist_ok=True)
    write_points_csv(pc.w, os.path.join(out, "particles.csv"))
    with open(os.path.join(out, "fit_report.csv"), "w", encoding="utf-8") as fh:
        fh.write("key,value\n")
        fh.write(f"algorithm,{cfg['algo']}\n")
        fh.write(f"final_objective,{_fmt(rep.final_objective)}\n")
        fh.write(f"iterations,{rep.iterations}\n")
        fh.write(f"converged,{str(rep.converged).lower()}\n")
        fh.write(f"wall_time,{_fmt(rep.wall_time if cfg['timing'] else 0.0)}\n")
        for i, v in enumerate(rep.objective_trace):
            fh.write(f"objective_{i},{_fmt(v)}\n")
    _write_manifest(out, "estimate", cfg, ["particles.csv", "fit_report.csv"])


# ---------------------------------------------------------------- simulate

def _simulate_config(a):
    base = {"law": "sph", "d": 2, "n": 500, "algo": "abcd", "k": None, "m": None, "L": None}
    if a.preset:
        if a.preset not in SIM_PRESETS:
            raise UsageError(f"unknown preset {a.preset!r}; choose from {', '.join(sorted(SIM_PRESETS))}")
        base.update(SIM_PRESETS[a.preset])
    for key in ("law", "d", "n", "algo", "k", "m", "L"):
        val = getattr(a, key)
        if val is not None:
            base[key] = val
    if base["law"] not in LAWS:
        raise UsageError(f"unknown law {base['law']!r}")
    if base["algo"] not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {base['algo']!r}")
    if base["d"] < 2:
        raise UsageError("--d must be >= 2")
    if a.reps < 1:
        raise UsageError("--reps must be >= 1")
    if a.lam < 0:
        raise UsageError("--lambda must be >= 0")
    _positive("h", a.h)
    _positive("n", base["n"])
    _positive("iters", a.iters)
    if base["k"] is not None and not 1 <= base["k"] <= base["n"]:
        raise UsageError(f"--k must satisfy 1 <= k <= n = {base['n']}")
    base.update({
        "reps": a.reps, "t": a.iters, "seed": a.seed, "kappa": a.kappa, "lam": a.lam, "h": a.h,
        "metric": a.metric, "svg": a.svg, "timing": not a.no_timing, "preset": a.preset,
    })
    return base


def run_simulate(cfg, out, threads):
    spec = ExperimentSpec(
        law=CoefficientLaw(cfg["law"], cfg["d"]), n=cfg["n"], algorithm=cfg["algo"],
        k=cfg["k"], m=cfg["m"], t=cfg["t"], reps=cfg["reps"], seed=cfg["seed"],
        vmf_kappa=cfg["kappa"], lam=cfg["lam"], h=cfg["h"], L=cfg["L"], metric=cfg["metric"],
    )
    report = run_experiment(spec, threads=threads, keep_outputs=cfg["svg"])
    os.makedirs(out, exist_ok=True)
    emit_table([report], os.path.join(out, "report.csv"), timing=cfg["timing"])
    artifacts = ["report.csv"]
    if cfg["svg"]:
        truth = np.vstack([b for _, b in report.outputs])
        fitted = np.vstack([o for o, _ in report.outputs])
        emit_scatter_svg([truth, fitted], os.path.join(out, "scatter.svg"), R=spec.law.R,
                         labels=["coefficients", "output"])
        artifacts.append("scatter.svg")
    _write_manifest(out, "simulate", dict(cfg, k=report.spec.k, m=report.spec.m, L=report.spec.L), artifacts)


# ---------------------------------------------------------------- flow

def _flow_config(a):
    cfg = {"n": a.n, "m": a.m, "t": a.t, "h": a.h, "L": [a.L] if a.L is not None else None,
           "lam": [a.lam]}
    if a.preset:
        if a.preset not in FLOW_PRESETS:
            raise UsageError(f"unknown preset {a.preset!r}; choose from {', '.join(sorted(FLOW_PRESETS))}")
        cfg.update(FLOW_PRESETS[a.preset])
    if a.data is not None and a.d is None:
        raise UsageError("--data requires --d")
    if a.law not in LAWS:
        raise UsageError(f"unknown law {a.law!r}")
    if any(x < 0 for x in cfg["lam"]):
        raise UsageError("--lambda must be >= 0")
    _positive("h", cfg["h"])
    _positive("t", cfg["t"])
    _positive("m", cfg["m"])
    _positive("radius", a.radius)
    if a.reps < 1:
        raise UsageError("--reps must be >= 1")
    if cfg["L"] is not None and any(x < 1 for x in cfg["L"]):
        raise UsageError("--L must be >= 1")
    cfg.update({"data": a.data, "d": a.d if a.d is not None else 2, "law": a.law, "k": a.k,
                "radius": a.radius, "seed": a.seed, "reps": a.reps, "clamp": a.clamp,
                "preset": a.preset})
    return cfg


def run_flow_cmd(cfg, out, threads):
    d = cfg["d"]
    if cfg["data"] is not None:
        ds = read_csv(cfg["data"], d)
        truth = None
    else:
        ds, truth = generate_dataset(CoefficientLaw(cfg["law"], d), cfg["n"], d, 0.1, cfg["seed"])
    k = cfg["k"] if cfg["k"] is not None else default_k(ds.n, d)
    if not 1 <= k <= ds.n:
        raise UsageError(f"--k must satisfy 1 <= k <= n = {ds.n}, got {k}")
    Ls = cfg["L"] if cfg["L"] is not None else [k]
    cfg = dict(cfg, k=k, L=Ls, n=ds.n)
    nd = normalize(ds)
    os.makedirs(out, exist_ok=True)
    artifacts, sets, labels = [], [], []
    if truth is not None:
        sets.append(truth)
        labels.append("coefficients")
    for L in Ls:
        for lam in cfg["lam"]:
            def one(rep, L=L, lam=lam):
                seed = _rng.stream(cfg["seed"], _rng.REPLICATE, rep).integers(0, 2**63)
                dirs = sample_haar_directions(d, cfg["m"], seed)
                fc = FlowConfig(L=L, lam=lam, h=cfg["h"], t=cfg["t"], R=cfg["radius"], seed=seed)
                return run_flow(nd, dirs, k, fc, clamp=cfg["clamp"]).final
            pts = np.vstack(_map(one, range(cfg["reps"]), threads))
            name = f"particles_L{L}_lambda{lam:g}.csv"
            write_points_csv(pts, os.path.join(out, name))
            artifacts.append(name)
            sets.append(pts)
            labels.append(f"L{L}_lambda{lam:g}")
    emit_scatter_svg(sets, os.path.join(out, "flow.svg"), R=cfg["radius"], labels=labels)
    artifacts.append("flow.svg")
    _write_manifest(out, "flow", cfg, artifacts)


# ---------------------------------------------------------------- causal

def _causal_config(a):
    if a.data is None or a.p is None:
        raise UsageError("causal requires --data and --p")
    if a.p < 1:
        raise UsageError("--p must be >= 1")
    _positive("epsilon", a.epsilon)
    _positive("radius", a.radius)
    _positive("m", a.m)
    _positive("iters", a.iters)
    if a.reps < 1:
        raise UsageError("--reps must be >= 1")
    return {"data": a.data, "p": a.p, "epsilon": a.epsilon, "radius": a.radius, "k": a.k,
            "m": a.m, "iters": a.iters, "normalize": not a.no_normalize, "seed": a.seed,
            "reps": a.reps}


def run_causal(cfg, out, threads):
    cd = read_causal_csv(cfg["data"], cfg["p"])
    k = cfg["k"] if cfg["k"] is not None else default_k(cd.n, cfg["p"] + 2)
    if not 1 <= k <= cd.n:
        raise UsageError(f"--k must satisfy 1 <= k <= n = {cd.n}, got {k}")
    cfg = dict(cfg, k=k, n=cd.n)
    cc = CausalConfig(epsilon=cfg["epsilon"], R_ball=cfg["radius"], k=k, m=cfg["m"],
                      t=cfg["iters"], normalize_inputs=cfg["normalize"])

    def one(rep):
        seed = _rng.stream(cfg["seed"], _rng.REPLICATE, rep).integers(0, 2**63)
        return estimate_effects(cd, cc, seed).samples

    samples = np.concatenate(_map(one, range(cfg["reps"]), threads))
    summary = EffectSummary(samples, {q: nearest_rank(samples, q) for q in PERCENTILES})
    os.makedirs(out, exist_ok=True)
    write_percentiles_csv(summary, os.path.join(out, "percentiles.csv"))
    write_points_csv(samples[:, None], os.path.join(out, "samples.csv"))
    _write_manifest(out, "causal", cfg, ["percentiles.csv", "samples.csv"])


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="rcmsw", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rcmsw {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default="rcmsw-out", help="output directory (default: rcmsw-out)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker cap; output bytes do not depend on it")
        sp.add_argument("--from-manifest", metavar="PATH", help="replay a previous run")

    e = sub.add_parser("estimate", help="fit the coefficient distribution to observations")
    e.add_argument("--data", help="CSV with header x1,...,xd,y")
    e.add_argument("--d", type=int)
    e.add_argument("--algo", choices=["bcd", "abcd"], default="abcd")
    e.add_argument("--k", type=int, help="neighbours per direction (default ceil(n^(d/(2d-1))))")
    e.add_argument("--m", type=int, default=1000, help="number of directions (default 1000)")
    e.add_argument("--iters", type=int, default=20, help="iterations; max iterations for bcd (default 20)")
    e.add_argument("--radius", type=float, default=10.0, help="ball radius R (default 10)")
    e.add_argument("--tol", type=float, default=1e-9, help="bcd stopping tolerance (default 1e-9)")
    e.add_argument("--no-timing", action="store_true", help="write 0 for wall-clock fields")
    common(e)

    s = sub.add_parser("simulate", help="run the simulation benchmark")
    s.add_argument("--preset", help="named configuration, e.g. table1-d2-abcd, table2-sph-n2000, fig1-flow")
    s.add_argument("--law")
    s.add_argument("--d", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--algo")
    s.add_argument("--k", type=int)
    s.add_argument("--m", type=int, help="directions (default 50 bcd/flow, 1000 abcd)")
    s.add_argument("--L", type=int, help="flow particles (default k)")
    s.add_argument("--iters", type=int, default=20)
    s.add_argument("--reps", type=int, default=20)
    s.add_argument("--kappa", type=float, default=0.1, help="vMF concentration of covariates")
    s.add_argument("--lambda", dest="lam", type=float, default=0.01)
    s.add_argument("--h", type=float, default=1.0)
    s.add_argument("--metric", choices=METRICS, default="full")
    s.add_argument("--svg", action="store_true", help="also write scatter.svg")
    s.add_argument("--no-timing", action="store_true", help="write 0 for mean_time")
    common(s)

    f = sub.add_parser("flow", help="run the diffusion particle sampler")
    f.add_argument("--preset", help="fig2 (lambda sweep) or fig2-particles (L sweep)")
    f.add_argument("--data", help="CSV with header x1,...,xd,y; synthetic data if omitted")
    f.add_argument("--d", type=int)
    f.add_argument("--law", default="sph", help="synthetic coefficient law (default sph)")
    f.add_argument("--n", type=int, default=2000, help="synthetic sample size (default 2000)")
    f.add_argument("--k", type=int)
    f.add_argument("--L", type=int, help="particles (default k)")
    f.add_argument("--lambda", dest="lam", type=float, default=0.01)
    f.add_argument("--h", type=float, default=1.0)
    f.add_argument("--t", type=int, default=20)
    f.add_argument("--m", type=int, default=50)
    f.add_argument("--radius", type=float, default=10.0)
    f.add_argument("--reps", type=int, default=1)
    f.add_argument("--clamp", action="store_true", help="project final particles onto the ball")
    common(f)

    c = sub.add_parser("causal", help="treatment-effect distribution")
    c.add_argument("--data", help="CSV with header z1,...,zp,w,y")
    c.add_argument("--p", type=int)
    c.add_argument("--epsilon", type=float, default=0.005)
    c.add_argument("--radius", type=float, default=10.0)
    c.add_argument("--k", type=int)
    c.add_argument("--m", type=int, default=1000)
    c.add_argument("--iters", type=int, default=20)
    c.add_argument("--reps", type=int, default=1)
    c.add_argument("--no-normalize", action="store_true", help="skip standardizing Z and Y")
    common(c)
    return p


COMMANDS = {
    "estimate": (_estimate_config, run_estimate),
    "simulate": (_simulate_config, run_simulate),
    "flow": (_flow_config, run_flow_cmd),
    "causal": (_causal_config, run_causal),
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    make_config, run = COMMANDS[args.command]
    try:
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        if args.from_manifest:
            cfg = _load_manifest(args.from_manifest, args.command)
        else:
            cfg = make_config(args)
        with np.errstate(over="raise", invalid="raise"):
            run(cfg, args.out, args.threads)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rcmsw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidArgumentError as exc:
        print(f"rcmsw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"rcmsw {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConditioningError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"rcmsw {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

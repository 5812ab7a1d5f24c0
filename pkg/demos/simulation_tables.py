"""
Benchmark tables
================

The benchmark draws covariates from a von Mises-Fisher law, coefficients from
one of three laws, fits, and reports the average sliced distance to the truth
over replicates. Shown here with few replicates so it runs in seconds.
"""

import os

from rcmsw import CoefficientLaw, ExperimentSpec, emit_table, run_experiment

out = os.path.join(os.path.dirname(__file__), "demos-out")
os.makedirs(out, exist_ok=True)

# error grows with dimension at fixed n ...
reports = []
for d in (2, 3, 4):
    rep = run_experiment(ExperimentSpec(CoefficientLaw("sph", d), n=500, reps=3, seed=0))
    reports.append(rep)
    print("d=%d  k=%d  distance %.3f  time %.3fs" % (d, rep.spec.k, rep.mean_distance, rep.mean_time))

# ... and shrinks with sample size, for each coefficient law
for law in ("sph", "deg", "dis"):
    for n in (500, 2000):
        rep = run_experiment(ExperimentSpec(CoefficientLaw(law, 2), n=n, reps=3, seed=0), threads=4)
        reports.append(rep)
        print("%s n=%d  distance %.3f" % (law, n, rep.mean_distance))

emit_table(reports, os.path.join(out, "tables.csv"))

"""Nearest-neighbour sliced-Wasserstein estimation of random coefficient distributions.

Given observations ``(X_i, Y_i)`` of the linear model ``Y = <beta, X>`` with a
random, unobserved ``beta``, estimate the law of ``beta`` as a uniform mixture
of ``k`` point masses in a ball.
"""

__version__ = "0.1.0"

from .errors import ConditioningError, DataError, InvalidArgumentError, ParseError, RCMError
from .sphere import (
    DirectionSet, project_ball, project_product_ball, sample_haar_directions, sample_vmf,
)
from .data import Dataset, NormalizedDataset, normalize, read_csv, read_points_csv, write_points_csv
from .slicing import SliceMatrix, build_slice_matrix, knn_indices
from .transport import sliced_w2_uniform, sw2_point_clouds, w2_squared_equal, w2_squared_uniform
from .estimator import (
    FitReport, ParticleConfig, RankAssignment, abcd_step, argsort_stable, bcd_step,
    default_k, eval_objective, fit_abcd, fit_bcd, solve_ball_least_squares,
)
from .flow import FlowConfig, FlowTrace, drift, empirical_cdf, empirical_quantile, run_flow
from .simbench import (
    CoefficientLaw, ExperimentReport, ExperimentSpec, emit_scatter_svg, emit_table,
    generate_dataset, run_experiment, sample_coefficients,
)
from .causal import (
    CausalConfig, CausalDataset, EffectSummary, build_design, estimate_effects, read_causal_csv,
    synthetic_scenario,
)

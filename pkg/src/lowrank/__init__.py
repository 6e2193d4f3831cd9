"""Determinants and inverses of operators perturbed by sums of dyadic products.

The library keeps a perturbation B' = B + sum_i v_i (x) p_i in factored form
and evaluates its determinant, its exact inverse, and a family of order-m
approximate inverses that become exact once m reaches the perturbation rank.
A benchmark CLI compares the approximation family against plain Taylor
truncations on random ensembles.
"""

from .approx import (
    AlphaCoefficients,
    ApproxReport,
    alpha_coefficients,
    approx_inverse,
    approx_report,
    osquare_truncated_inverse,
    taylor_inverse,
    truncated_det,
)
from .bench import ExperimentConfig, SummaryRow, TrialRecord, run_experiment, summarize
from .errors import (
    DegenerateMetric,
    DimensionMismatch,
    LowRankError,
    ProblemFormatError,
    SingularBase,
    SingularMatrix,
    SingularPerturbation,
    TruncatedDetSingular,
)
from .exact import (
    ExactInverseResult,
    PerturbedIdentity,
    det_perturbed_identity,
    inverse_perturbed_identity,
    osquare_apply,
    osquare_operator,
    pairing_form_inverse,
    perturbed_inverse_exact,
)
from .metric import Metric, musical_flat, musical_sharp, perturbed_dual_inverse
from .oracle import (
    LuFactorization,
    lu_det,
    lu_factor,
    lu_inverse,
    lu_solve,
    wedge_bruteforce,
)
from .problems import Problem, load_problem, parse_problem
from .tensor import (
    Covector,
    Dyad,
    DyadicPerturbation,
    GramMatrix,
    Operator,
    Vector,
    dyad_to_operator,
    gram,
    pair,
    principal_minor_sum,
    wedge_eval,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaCoefficients",
    "ApproxReport",
    "Covector",
    "DegenerateMetric",
    "DimensionMismatch",
    "Dyad",
    "DyadicPerturbation",
    "ExactInverseResult",
    "ExperimentConfig",
    "GramMatrix",
    "LowRankError",
    "LuFactorization",
    "Metric",
    "Operator",
    "PerturbedIdentity",
    "Problem",
    "ProblemFormatError",
    "SingularBase",
    "SingularMatrix",
    "SingularPerturbation",
    "SummaryRow",
    "TrialRecord",
    "TruncatedDetSingular",
    "Vector",
    "alpha_coefficients",
    "approx_inverse",
    "approx_report",
    "det_perturbed_identity",
    "dyad_to_operator",
    "gram",
    "inverse_perturbed_identity",
    "load_problem",
    "lu_det",
    "lu_factor",
    "lu_inverse",
    "lu_solve",
    "musical_flat",
    "musical_sharp",
    "osquare_apply",
    "osquare_operator",
    "osquare_truncated_inverse",
    "pair",
    "pairing_form_inverse",
    "parse_problem",
    "perturbed_dual_inverse",
    "perturbed_inverse_exact",
    "principal_minor_sum",
    "run_experiment",
    "summarize",
    "taylor_inverse",
    "truncated_det",
    "wedge_bruteforce",
    "wedge_eval",
]

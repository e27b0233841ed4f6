"""Spectral analysis of correlation matrices through the mean ``c`` and
standard deviation ``sigma`` of their off-diagonal entries."""

__version__ = "0.1.0"

from .bounds import (
    Branch,
    BoundReport,
    UniversalBounds,
    bound_report,
    fueredi_komlos_reference,
    lambda1_bound,
    polar,
    psd_top_eig_bound,
    theta_min_bound,
    theta_min_relaxed,
    universal_bounds,
    w1_bound,
    w1_bracket_bound,
    wieland_residual_check,
    wmax_bound,
)
from .constructors import (
    ConstructionRecipe,
    RecipeKind,
    block_counterexample,
    build,
    constant,
    construct_counterexample,
    convex_combination,
    convex_with_identity,
    counterexample_for,
    embed,
    identity,
    perturbation_counterexample,
    perturbed_rank_one,
    random_correlation,
    rank_one,
    rank_one_k,
    tensor_product,
)
from .core import (
    Characteristic,
    CorrelationMatrix,
    ValidationReport,
    ViolationKind,
    as_correlation,
    characteristic,
    g_n,
    gram_from_columns,
    legal_domain,
    min_mean_correlation,
    s,
    s_n,
    validate_correlation,
)
from .domains import (
    Condition,
    GuaranteeReport,
    Status,
    classify,
    counterexample_triangle,
    inverse_embedding_characteristic,
    perturbation_mu_max,
    rank_one_feasible_k,
    region_membership,
    refined_guarantee,
    simple_guarantee,
    theorem3_guarantee,
    theorem5_guarantee,
)
from .exceptions import *  # noqa: F401,F403
from .spectral import (
    Alignment,
    SpectralData,
    characteristic_identity_residuals,
    eigendecompose,
    eigenspace_weights,
    w1_vs_wmax,
    weights,
)


def __getattr__(name):
    # scikit-learn is slow to import; only pay for it when the estimator is used
    if name == "CorrelationSpectrum":
        from .estimator import CorrelationSpectrum

        return CorrelationSpectrum
    raise AttributeError(f"module 'corrspec' has no attribute {name!r}")

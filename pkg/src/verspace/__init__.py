"""verspace: test-error distributions of interpolating classifiers.

Samples the version space of linear and random-feature classifiers by
rejection-free constrained Gaussian MCMC, estimates the full CDF of test
errors over those interpolators, constructs near-worst-case interpolators,
and numerically validates the equicorrelated-data theory (orthant
asymptotics, Gamma-limit CDF, critical values) against independent oracles.
"""

from .data import (
    LabeledDataset,
    Standardization,
    apply_standardization,
    load_idx,
    make_binary_task,
    mixture_mean,
    sample_gaussian_mixture,
    save_idx,
    standardize,
    subsample,
)
from .equicorr import (
    EquicorrModel,
    critical_value,
    equicorr_feature_rows,
    equicorr_population_errors,
    exact_cdf_half_correlation,
    limit_cdf,
    next_point_correct_asymptotic,
    orthant_asymptotic,
    orthant_quadrature,
    simulate_equicorr_rn,
    std_normal_cdf,
    std_normal_quantile,
    theory_table,
)
from .estimator import (
    ErrorCdf,
    GaussianMixtureSpec,
    WorstCaseInfo,
    bayes_lower_bound,
    chain_errors,
    default_grid,
    empirical_error,
    error_cdf,
    error_quantiles,
    population_error_gaussian,
    population_errors_gaussian,
    worst_case_classifier,
    write_cdf_csv,
    write_errors_csv,
)
from .exceptions import (
    ChainNumericalError,
    ConfigError,
    DataError,
    InfeasibleConstraintsError,
    NumericalUnderflowError,
    VerspaceError,
)
from .features import (
    FeatureMap,
    build_constraints,
    linear_map,
    random_relu_map,
    sample_sphere_rows,
)
from .sampler import (
    AngularIntervalSet,
    ChainConfig,
    ConstraintSet,
    WeightChain,
    backend_name,
    elliptical_slice_step,
    feasible_arcs,
    initial_feasible_point,
    sample_version_space,
)

__version__ = "0.1.0"

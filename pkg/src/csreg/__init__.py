"""Current status linear regression.

Estimation of a linear regression slope when the response is only
observed through a current status indicator at a random check time:
shape-constrained fits of the error distribution, score estimators with
and without smoothing, a kernel plug-in estimator, intercept
estimation, population-level oracles, and a Monte Carlo harness.
"""

from .errors import (
    AllExcludedError,
    AllFailedError,
    BracketError,
    CsregError,
    ExcludedError,
    NoCrossingError,
    QuadratureError,
    SingularInformationError,
)
from .estimators import (
    DEFAULT_EPS,
    DEFAULT_INTERVAL,
    EstimateResult,
    GridReport,
    InterceptEstimate,
    attach_intercept,
    estimate,
    estimate_plugin,
    estimate_profile_mle,
    estimate_score1,
    estimate_score2,
    intercept_from_mle,
    intercept_from_plugin,
)
from .isotonic import (
    StepDistribution,
    cusum_diagram,
    fit_with_values,
    log_likelihood,
    mle_fixed_beta,
)
from .kernels import (
    KernelConfig,
    bandwidth,
    kernel,
    kernel_deriv,
    plugin_F,
    plugin_F_grid,
    plugin_dF_dbeta,
    smoothed_density,
)
from .model import (
    ErrorLaw,
    ModelSpec,
    Observation,
    ResidualOrder,
    Sample,
    TruncationSpec,
    conditional_x_moments,
    covariate_window,
    error_cdf,
    error_pdf,
    f_beta,
    quadratic_error_law,
    residual_density,
    residual_density_breakpoints,
    residual_order,
    residual_support,
    simulate,
    simulation_model,
)
from .montecarlo import (
    BootstrapConfig,
    BootstrapResult,
    MCConfig,
    MCRow,
    MCTable,
    bootstrap_bandwidth,
    mc_mse_curve,
    replication_seed,
    run_montecarlo,
)
from .oracles import (
    InfluenceReport,
    PopulationReport,
    fisher_parametric,
    fisher_semiparametric,
    identifiability_integral,
    influence_representation_check,
    intercept_variance,
    population_score1,
    score1_asymptotic_variance,
    score1_variance_components,
)
from .scores import (
    CrossingResult,
    ScoreValue,
    find_root_brent,
    find_zero_crossing,
    psi1,
    psi2,
    psi3,
)

__version__ = "0.1.0"

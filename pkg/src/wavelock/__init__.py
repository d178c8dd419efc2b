"""Sharp norm bounds for Cauchy-wavelet localization operators.

The library computes the optimal operator-norm bound for localization
operators whose weight is constrained in two Lebesgue norms on the
hyperbolic upper half-plane, classifies which constraint binds,
reconstructs the extremal weights, and checks everything against two
independent numerical oracles (a discrete variational solver and a
direct operator-norm computation).
"""

from .core import (
    FOUR_PI,
    DerivedConstants,
    ParameterError,
    ProblemParams,
    Regime,
    RegimeError,
    canonical_order,
    classify_regime,
    derive_constants,
    g_eval,
    g_prime,
)
from .closed_form import (
    MomentCheck,
    RadialProfile,
    SingleConstraintResult,
    disc_measure,
    distribution_of_profile,
    single_bound,
    single_profile,
    verify_moment_identities,
)
from .solver import (
    BoundReport,
    Multipliers,
    QuadratureConfig,
    QuadratureError,
    SolverError,
    bound_integral,
    compute_bound,
    find_T,
    moment,
    multipliers,
    solve_multipliers,
    u_eval,
)
from .weight import (
    ExtremalWeight,
    HalfPlanePoint,
    eval_weight,
    measured_distribution,
    pseudo_hyperbolic,
    psi_inverse,
    weight_from_report,
    weight_norms,
)
from .oracle import (
    DiscreteProblem,
    DiscreteSolution,
    OracleError,
    check_monotone_restoration,
    isotonic_nonincreasing,
    run_oracle,
    solve_discrete,
)
from .verifier import (
    CauchyTransform,
    FrequencyGrid,
    PlaneGrid,
    PowerIterationResult,
    VerificationReport,
    cauchy_wavelet_hat,
    localization_apply,
    operator_norm,
    run_verification,
    wavelet_transform,
)

__version__ = "0.1.0"

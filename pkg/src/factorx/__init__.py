"""Exact and asymptotic counting of degree-constrained subgraphs of
dense graphs, with the closed-form expansion for counting regular graphs
and edge-occurrence probabilities in random factors."""

from .betas import (
    BetaState,
    approx_beta,
    beta_state,
    delta_residual,
    lambda_matrix,
    solve_beta,
)
from .cumulants import (
    MonomialSum,
    Term,
    cumulant_of_polynomial,
    gaussian_moment,
    joint_cumulant,
    kn_covariances,
    overlap_covariance_accessor,
    pair_covariance_accessor,
    power_joint_cumulant,
    power_moment,
    taylor_coefficients,
)
from .errors import (
    BudgetExceededError,
    ConvergenceError,
    DomainError,
    FactorxError,
    ParseError,
)
from .estimate import (
    Estimate,
    build_r_polynomial,
    default_sigma,
    edge_probability_estimate,
    estimate_log_count,
    log_m,
    truncation_orders,
)
from .exact import exact_edge_probability, exact_factor_count, exact_regular_count
from .gaussian import GaussianModel, build_gaussian_model, pairwise_covariance
from .graphs import (
    AssumptionParams,
    AssumptionReport,
    CheegerResult,
    Graph,
    algebraic_bipartiteness,
    build_graph,
    check_assumptions,
    cheeger,
    complete_graph,
    parse_edge_list,
    parse_graph6,
    serialize_edge_list,
    signless_laplacian,
)
from .numformat import mantissa_exponent
from .regular import (
    RegularExpansionResult,
    corrections,
    p_poly,
    rg_log_expansion,
    stirling_xi,
)

__version__ = "0.1.0"

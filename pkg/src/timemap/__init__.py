"""Time-map solutions of the 1-D Emden and Gelfand problems, their
radial lifts to weighted problems on annuli, and a shooting oracle."""

from .annulus import (
    AnnulusProblem,
    RadialSolution,
    eval_radial,
    green_annulus,
    r0,
    radial_limit_profile,
    radial_residual,
    reduce_interval,
    rescaled_radial_profile,
    solve_radial,
)
from .emden import EmdenSolution, Interval, eval_W, eval_W_prime, lq_norm, solve_emden
from .errors import (
    ConvergenceError,
    DomainError,
    IntegrandDomainError,
    NoSolutionError,
    NumericError,
    StiffnessError,
    TimeMapError,
)
from .gelfand import (
    BifurcationDiagram,
    GelfandSolution,
    bifurcation_diagram,
    delta,
    eval_W_gelfand,
    gamma,
    green_representation_check,
    lambda_of_mu,
    lambda_star,
    rescaled_profile_gelfand,
    solve_branch,
)
from .oracle import IvpTrace, integrate_ivp, shoot_emden, shoot_gelfand
from .profiles import (
    RescaledProfile,
    emden_limit_p_infty,
    emden_limit_p_one,
    eps_p,
    green_1d,
    liouville_U,
    rescale_emden,
    sup_distance,
)
from .quad import L_p, QuadratureResult, beta, integrate_endpoint_singular

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

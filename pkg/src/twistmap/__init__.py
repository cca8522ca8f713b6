"""Time-map analysis of the pre-twisted Freedericksz boundary value problem.

    x'' = -sin(2x),   x(-L) = -phi0,   x(L) = phi1,

with the field parameter lam = 8 L**2.  Solutions are orbits of a pendulum
type system; their transit times between the two boundary lines, written
through three time-maps, give the whole bifurcation diagram in closed form
up to quadrature.
"""

from .branches import (
    BranchId,
    BranchKind,
    BranchPoint,
    CriticalOrbits,
    Stability,
    branch_domain,
    branch_time,
    branch_time_dalpha,
    critical_times,
    endpoint_ordinates,
    lambda_of_L,
    L_of_lambda,
    make_point,
    mirror,
    mirror_point,
)
from .continuation import Diagram, SaddleNode, build_diagram, find_saddle_node, solve_at_L, trace_branch
from .quadrature import DEFAULT_CONFIG, DomainError, QuadConfig, QuadratureError
from .stability import StabilityVerdict, classify, zero_count
from .timemaps import (
    CellParams,
    OrbitParam,
    Regime,
    alpha_of_beta,
    beta_of_alpha,
    d_quarter_period,
    d_time_to_line_dalpha,
    quarter_period,
    time_above,
    time_to_line,
)

__version__ = "0.1.0"

__all__ = [
    "BranchId",
    "BranchKind",
    "BranchPoint",
    "CellParams",
    "CriticalOrbits",
    "DEFAULT_CONFIG",
    "Diagram",
    "DomainError",
    "L_of_lambda",
    "OrbitParam",
    "QuadConfig",
    "QuadratureError",
    "Regime",
    "SaddleNode",
    "Stability",
    "StabilityVerdict",
    "alpha_of_beta",
    "beta_of_alpha",
    "branch_domain",
    "branch_time",
    "branch_time_dalpha",
    "build_diagram",
    "classify",
    "critical_times",
    "d_quarter_period",
    "d_time_to_line_dalpha",
    "endpoint_ordinates",
    "find_saddle_node",
    "lambda_of_L",
    "make_point",
    "mirror",
    "mirror_point",
    "quarter_period",
    "solve_at_L",
    "time_above",
    "time_to_line",
    "trace_branch",
    "zero_count",
]

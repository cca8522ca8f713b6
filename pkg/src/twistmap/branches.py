"""Branch families of the boundary value problem and their transit times.

An orbit joining the line x = -phi0 (at t = -L) to the line x = phi1 (at
t = L) is determined by its energy level and by how it travels around the
origin.  The four kinds are named after the signs of the end ordinates:

    kind   y(-L)   y(L)   transit time 2L
    A       +       +     4k T + T1(phi0) + T1(phi1)
    Cr      +       -     (4k+2) T + T1(phi0) - T1(phi1)
    Cl      -       +     (4k+2) T - T1(phi0) + T1(phi1)
    D       -       -     4(k+1) T - T1(phi0) - T1(phi1)

with T = T(alpha), T1(phi) = T1(alpha, phi) and k the number of complete
turns around the origin.  Because the kinds are geometric, the same table
serves both orientations phi0 < phi1 and phi0 > phi1; exchanging the
boundary angles maps Cr onto Cl (see :func:`mirror_point`).
"""

import enum
import math
from dataclasses import dataclass, replace

from .quadrature import DEFAULT_CONFIG, DomainError
from .timemaps import (
    CellParams,
    OrbitParam,
    quarter_period,
    quarter_period_mderiv,
    time_above,
    time_to_line,
    time_to_line_mderiv,
)

__all__ = [
    "KIND_ORDER",
    "BranchKind",
    "BranchId",
    "Stability",
    "BranchPoint",
    "CriticalOrbits",
    "BranchDomain",
    "branch_time",
    "branch_time_mderiv",
    "branch_time_dalpha",
    "critical_times",
    "critical_time",
    "branch_domain",
    "endpoint_ordinates",
    "make_point",
    "critical_point",
    "is_folded",
    "meets_upper_critical",
    "mirror",
    "mirror_branch",
    "mirror_point",
    "lambda_of_L",
    "L_of_lambda",
]


class BranchKind(enum.Enum):
    A = "A"
    CR = "Cr"
    CL = "Cl"
    D = "D"

    @classmethod
    def parse(cls, text):
        for kind in cls:
            if kind.value.lower() == str(text).strip().lower():
                return kind
        raise ValueError(f"unknown branch kind {text!r}")


KIND_ORDER = {BranchKind.A: 0, BranchKind.CR: 1, BranchKind.CL: 2, BranchKind.D: 3}

# (quarter periods per turn offset, sign of T1(phi0), sign of T1(phi1));
# the T1 signs are also the signs of y(-L) and y(L).
_COEFFS = {
    BranchKind.A: (0, 1, 1),
    BranchKind.CR: (2, 1, -1),
    BranchKind.CL: (2, -1, 1),
    BranchKind.D: (4, -1, -1),
}


@dataclass(frozen=True)
class BranchId:
    kind: BranchKind
    k: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, BranchKind):
            object.__setattr__(self, "kind", BranchKind.parse(self.kind))
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"winding number must be a non-negative integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    @property
    def sort_key(self):
        return (KIND_ORDER[self.kind], self.k)

    @property
    def coefficients(self):
        base, s0, s1 = _COEFFS[self.kind]
        return 4 * self.k + base, s0, s1

    @property
    def label(self):
        return f"{self.kind.value}{self.k}"

    def __str__(self):
        return f"{self.kind.value}(k={self.k})"


class Stability(enum.Enum):
    STABLE = "AsymptoticallyStable"
    UNSTABLE = "Unstable"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class BranchPoint:
    """One sample of a bifurcation diagram."""

    branch: BranchId
    param: OrbitParam
    L: float
    lam: float
    y_minus: float
    y_plus: float
    stability: Stability = Stability.UNDETERMINED

    @property
    def energy(self):
        return self.param.energy


@dataclass(frozen=True)
class CriticalOrbits:
    """Transit times of the two orbits of winding k that end at a turning point.

    ``T_star`` belongs to the orbit meeting branch A, ``T_upper`` to the one
    meeting branch D.  Both have |y| = ``y_abs`` at the other end.
    """

    k: int
    T_star: float
    T_upper: float
    y_abs: float

    def ordinates(self, which, cell):
        """(y(-L), y(L)) of the lower ("star") or upper critical orbit."""
        sign = 1.0 if which == "star" else -1.0
        if cell.canonical:
            return sign * self.y_abs, 0.0
        return 0.0, sign * self.y_abs


@dataclass(frozen=True)
class BranchDomain:
    """Admissible orbit parameters of a branch.

    Closed orbits take amplitudes in the half-open interval
    (alpha_lo, alpha_hi]; only A with k = 0 continues through the separatrix
    to open orbits with crossing height in [sqrt(2), inf).
    """

    alpha_lo: float
    alpha_hi: float
    includes_open: bool

    @property
    def energy_lo(self):
        return -math.cos(2.0 * self.alpha_lo)

    @property
    def energy_hi(self):
        return math.inf if self.includes_open else -math.cos(2.0 * self.alpha_hi)

    def contains(self, param):
        if param.is_closed:
            return self.alpha_lo < param.value <= self.alpha_hi
        return self.includes_open


def branch_domain(cell, branch, cfg=DEFAULT_CONFIG):
    return BranchDomain(
        alpha_lo=cell.phi_max,
        alpha_hi=cfg.alpha_cap,
        includes_open=(branch.kind is BranchKind.A and branch.k == 0),
    )


def _check_param(cell, branch, param, cfg):
    if not branch_domain(cell, branch, cfg).contains(param):
        raise DomainError(f"{param} outside the domain of branch {branch} for {cell}")


def branch_time(cell, branch, param, cfg=DEFAULT_CONFIG):
    """Total transit time 2L of the orbit ``param`` travelled as ``branch``."""
    _check_param(cell, branch, param, cfg)
    if not param.is_closed:
        return time_above(param.value, cell.phi0, cfg) + time_above(param.value, cell.phi1, cfg)
    alpha = param.value
    n, s0, s1 = branch.coefficients
    total = s0 * time_to_line(alpha, cell.phi0, cfg) + s1 * time_to_line(alpha, cell.phi1, cfg)
    if n:
        total += n * quarter_period(alpha, cfg)
    return total


def branch_time_mderiv(cell, branch, param, order=1, cfg=DEFAULT_CONFIG):
    """d^n(2L)/dm^n with m = sin(alpha)**2, for closed orbits (n = 1, 2)."""
    _check_param(cell, branch, param, cfg)
    if not param.is_closed:
        raise DomainError("modular derivatives are defined for closed orbits only")
    alpha = param.value
    n, s0, s1 = branch.coefficients
    total = s0 * time_to_line_mderiv(alpha, cell.phi0, order, cfg)
    total += s1 * time_to_line_mderiv(alpha, cell.phi1, order, cfg)
    if n:
        total += n * quarter_period_mderiv(alpha, order, cfg)
    return total


def branch_time_dalpha(cell, branch, param, cfg=DEFAULT_CONFIG):
    """d(2L)/dalpha along a branch of closed orbits."""
    return branch_time_mderiv(cell, branch, param, 1, cfg) * math.sin(2.0 * param.value)


def critical_times(cell, k, cfg=DEFAULT_CONFIG):
    """Transit times of the critical orbits of winding k."""
    hi, lo = cell.phi_max, cell.phi_min
    t_hi = quarter_period(hi, cfg)
    t1 = time_to_line(hi, lo, cfg)
    y_abs = math.sqrt(max(0.0, 2.0 * math.sin(hi - lo) * math.sin(hi + lo)))
    return CriticalOrbits(
        k=k,
        T_star=(4 * k + 1) * t_hi + t1,
        T_upper=(4 * k + 3) * t_hi - t1,
        y_abs=y_abs,
    )


def meets_upper_critical(cell, branch):
    """True if the branch ends at the upper critical orbit (time T_upper).

    In the orientation phi0 < phi1 these are Cl and D; exchanging the
    boundary angles swaps the roles of Cr and Cl.
    """
    if branch.kind is BranchKind.D:
        return True
    if branch.kind is BranchKind.A:
        return False
    if cell.canonical:
        return branch.kind is BranchKind.CL
    return branch.kind is BranchKind.CR


def critical_time(cell, branch, cfg=DEFAULT_CONFIG):
    crit = critical_times(cell, branch.k, cfg)
    return crit.T_upper if meets_upper_critical(cell, branch) else crit.T_star


def is_folded(cell, branch):
    """Whether the transit time along ``branch`` has an interior minimum.

    A with k >= 1 always folds; the C branch attached to the upper critical
    orbit folds unless the cell is symmetric.
    """
    if branch.kind is BranchKind.A:
        return branch.k >= 1
    if branch.kind is BranchKind.D:
        return False
    return meets_upper_critical(cell, branch) and not cell.symmetric


def endpoint_ordinates(cell, branch, param):
    """(y(-L), y(L)) from energy conservation and the branch sign pattern."""
    _, s0, s1 = branch.coefficients
    g0 = param.gap(cell.phi0)
    g1 = param.gap(cell.phi1)
    if g0 < 0.0 or g1 < 0.0:
        raise DomainError(f"orbit {param} does not reach both boundary lines of {cell}")
    return s0 * math.sqrt(g0), s1 * math.sqrt(g1)


def make_point(cell, branch, param, cfg=DEFAULT_CONFIG):
    two_L = branch_time(cell, branch, param, cfg)
    y_minus, y_plus = endpoint_ordinates(cell, branch, param)
    L = 0.5 * two_L
    return BranchPoint(branch, param, L, lambda_of_L(L), y_minus, y_plus)


def critical_point(cell, branch, cfg=DEFAULT_CONFIG):
    """The critical orbit closing ``branch`` at alpha = max(phi0, phi1)."""
    param = OrbitParam.closed(cell.phi_max)
    L = 0.5 * critical_time(cell, branch, cfg)
    y_minus, y_plus = endpoint_ordinates(cell, branch, param)
    # the turning point sits exactly on the boundary
    if cell.phi1 == cell.phi_max:
        y_plus = 0.0
    if cell.phi0 == cell.phi_max:
        y_minus = 0.0
    return BranchPoint(branch, param, L, lambda_of_L(L), y_minus, y_plus)


def mirror(cell):
    """Cell with the boundary angles exchanged.

    Solutions correspond through x(t) -> -x(-t), which swaps y(-L) and y(L)
    (see :func:`mirror_point`).  The map is an involution.
    """
    return CellParams(cell.phi1, cell.phi0)


_SWAP = {BranchKind.CR: BranchKind.CL, BranchKind.CL: BranchKind.CR}


def mirror_branch(branch):
    return BranchId(_SWAP.get(branch.kind, branch.kind), branch.k)


def mirror_point(point):
    return replace(
        point,
        branch=mirror_branch(point.branch),
        y_minus=point.y_plus,
        y_plus=point.y_minus,
    )


def lambda_of_L(L):
    if not L > 0:
        raise DomainError(f"half-length must be positive, got {L!r}")
    return 8.0 * L * L


def L_of_lambda(lam):
    if not lam > 0:
        raise DomainError(f"field parameter must be positive, got {lam!r}")
    return math.sqrt(lam / 8.0)

"""Stability of equilibria from the zeros of y = x' and the time-map slope.

An equilibrium whose derivative has no zero on a half-open interval
[-L, L) or (-L, L] is asymptotically stable, and one whose derivative
vanishes twice or more is unstable.  With exactly one interior zero the
verdict follows the slope of the branch transit time: increasing means
stable, decreasing means unstable.
"""

import enum
from dataclasses import dataclass

from .branches import Stability, branch_time_dalpha, meets_upper_critical
from .quadrature import DEFAULT_CONFIG

__all__ = ["Rule", "StabilityVerdict", "zero_count", "classify", "SLOPE_EPS"]

SLOPE_EPS = 1e-12


class Rule(enum.Enum):
    NO_ZEROS = "NoZeros"
    TWO_OR_MORE = "TwoOrMore"
    SINGLE_ZERO_SLOPE = "SingleZeroSlope"


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: Stability
    zero_count: int
    rule: Rule


def zero_count(branch):
    """Turning points of an orbit of ``branch`` strictly inside (-L, L)."""
    n, _, _ = branch.coefficients
    return n // 2


def _critical_zero_count(cell, branch):
    # the critical orbit has one more zero on the boundary itself, which a
    # half-open interval leaves out
    return 2 * branch.k + (1 if meets_upper_critical(cell, branch) else 0)


def _by_count(zeros):
    if zeros == 0:
        return StabilityVerdict(Stability.STABLE, 0, Rule.NO_ZEROS)
    if zeros >= 2:
        return StabilityVerdict(Stability.UNSTABLE, zeros, Rule.TWO_OR_MORE)
    return None


def classify(cell, branch, param, cfg=DEFAULT_CONFIG):
    if param.is_closed and param.value == cell.phi_max:
        zeros = _critical_zero_count(cell, branch)
        # a single interior zero plus a boundary zero: the slope is unbounded
        # there and no theorem applies
        return _by_count(zeros) or StabilityVerdict(Stability.UNDETERMINED, zeros, Rule.SINGLE_ZERO_SLOPE)
    zeros = zero_count(branch)
    verdict = _by_count(zeros)
    if verdict is not None:
        return verdict
    slope = branch_time_dalpha(cell, branch, param, cfg)
    if slope > SLOPE_EPS:
        v = Stability.STABLE
    elif slope < -SLOPE_EPS:
        v = Stability.UNSTABLE
    else:
        v = Stability.UNDETERMINED
    return StabilityVerdict(v, zeros, Rule.SINGLE_ZERO_SLOPE)

"""Branch tracing, inversion of transit times, saddle-nodes and diagrams.

The problem is integrable, so no arclength continuation is needed: every
branch is the graph of its transit time over the orbit parameter.  Branches
are sampled in m = sin(alpha)**2 (in the energy for A, k = 0), inverted with
Brent's method, and folds are located as the unique zero of dT/dm.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np
from scipy.optimize import brentq

from .branches import (
    BranchId,
    BranchKind,
    BranchPoint,
    CriticalOrbits,
    branch_time,
    branch_time_mderiv,
    critical_point,
    critical_time,
    critical_times,
    is_folded,
    make_point,
    mirror,
    mirror_branch,
    mirror_point,
)
from .quadrature import DEFAULT_CONFIG, DomainError
from .timemaps import CellParams, OrbitParam

__all__ = [
    "SaddleNode",
    "Diagram",
    "root_tolerance",
    "find_saddle_node",
    "solve_at_L",
    "trace_branch",
    "build_diagram",
    "mirror_diagram",
    "all_branches",
]

log = logging.getLogger(__name__)

# default upper energy of the A, k = 0 sweep (crossing height 2)
A_ENERGY_MAX = 3.0
# closest approach to the critical amplitude used when bracketing
_EDGE = 1e-12


@dataclass(frozen=True)
class SaddleNode:
    branch: BranchId
    param_at_min: OrbitParam
    L_sn: float
    T_min: float

    @property
    def alpha(self):
        return self.param_at_min.value

    @property
    def mtilde(self):
        return math.sin(self.param_at_min.value) ** 2


@dataclass
class Diagram:
    cell: CellParams
    points: Dict[BranchId, List[BranchPoint]]
    criticals: List[CriticalOrbits]
    saddles: List[SaddleNode]
    symmetric_overlay: Optional["Diagram"] = None
    settings: dict = field(default_factory=dict)

    def all_points(self):
        for branch in sorted(self.points):
            yield from self.points[branch]

    def __len__(self):
        return sum(len(v) for v in self.points.values())


def root_tolerance(L):
    return 1e-10 * (1.0 + 2.0 * L)


def all_branches(k_max):
    return [BranchId(kind, k) for k in range(k_max + 1) for kind in BranchKind]


def _closed_time(cell, branch, alpha, cfg):
    return branch_time(cell, branch, OrbitParam.closed(alpha), cfg)


def _slope(cell, branch, alpha, cfg):
    return branch_time_mderiv(cell, branch, OrbitParam.closed(alpha), 1, cfg)


def find_saddle_node(cell, branch, cfg=DEFAULT_CONFIG):
    """Minimum of the transit time along a folded branch.

    Located as the zero of dT/dm between the critical amplitude (where the
    slope tends to -inf) and alpha_cap (where it tends to +inf).
    """
    if not is_folded(cell, branch):
        raise DomainError(f"branch {branch} is monotone for {cell}; no saddle-node")
    lo = cell.phi_max + _EDGE
    hi = cfg.alpha_cap
    if _slope(cell, branch, lo, cfg) >= 0.0:
        raise DomainError(f"transit time of {branch} does not decrease from the critical orbit")
    if _slope(cell, branch, hi, cfg) <= 0.0:
        raise DomainError(f"transit time of {branch} does not turn up before alpha_cap")
    alpha = brentq(lambda a: _slope(cell, branch, a, cfg), lo, hi, xtol=1e-14, rtol=1e-15)
    param = OrbitParam.closed(alpha)
    t_min = branch_time(cell, branch, param, cfg)
    return SaddleNode(branch, param, 0.5 * t_min, t_min)


def _solve_closed(cell, branch, two_L, lo, hi, cfg):
    f = lambda a: _closed_time(cell, branch, a, cfg) - two_L  # noqa: E731
    alpha = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    return OrbitParam.closed(alpha)


def _a0_time(cell, energy, cfg):
    return branch_time(cell, BranchId(BranchKind.A, 0), OrbitParam.from_energy(energy), cfg)


def _solve_a0(cell, two_L, cfg):
    e_lo = -math.cos(2.0 * cell.phi_max)
    t_star = critical_times(cell, 0, cfg).T_star
    if two_L >= t_star:
        return []
    e_hi = A_ENERGY_MAX
    while _a0_time(cell, e_hi, cfg) > two_L:
        e_hi = 4.0 * e_hi + 1.0
    # nudge off the critical energy, where the amplitude equals phi_max
    step = max(abs(e_lo), 1.0) * 2.0 ** -52
    e_start = e_lo + step
    while OrbitParam.from_energy(e_start).value <= cell.phi_max:
        step *= 2.0
        e_start = e_lo + step
    f = lambda e: _a0_time(cell, e, cfg) - two_L  # noqa: E731
    if f(e_start) <= 0.0:
        return []
    energy = brentq(f, e_start, e_hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    return [OrbitParam.from_energy(energy)]


def solve_at_L(cell, branch, L, cfg=DEFAULT_CONFIG, saddle=None):
    """All orbit parameters on ``branch`` with transit time 2L.

    Returned in increasing energy order; on a folded branch the first root
    (if two are found) lies between the critical orbit and the saddle-node.
    """
    if not L > 0:
        raise DomainError(f"half-length must be positive, got {L!r}")
    two_L = 2.0 * L
    tol = root_tolerance(L)
    if branch.kind is BranchKind.A and branch.k == 0:
        roots = _solve_a0(cell, two_L, cfg)
    else:
        lo = cell.phi_max + _EDGE
        hi = cfg.alpha_cap
        t_crit = critical_time(cell, branch, cfg)
        t_cap = _closed_time(cell, branch, hi, cfg)
        roots = []
        if is_folded(cell, branch):
            sn = saddle or find_saddle_node(cell, branch, cfg)
            if two_L < sn.T_min - tol:
                return []
            if abs(two_L - sn.T_min) <= tol:
                return [sn.param_at_min]
            if two_L < t_crit - tol:
                roots.append(_solve_closed(cell, branch, two_L, lo, sn.alpha, cfg))
            if two_L <= t_cap:
                roots.append(_solve_closed(cell, branch, two_L, sn.alpha, hi, cfg))
        elif t_crit < two_L <= t_cap:
            roots.append(_solve_closed(cell, branch, two_L, lo, hi, cfg))
    accepted = []
    for p in roots:
        resid = abs(branch_time(cell, branch, p, cfg) - two_L)
        if resid <= tol:
            accepted.append(p)
        else:
            # only happens within rounding distance of the critical orbit
            log.debug("dropping root %s of %s at L=%r: residual %.3e", p, branch, L, resid)
    return accepted


def _alpha_of_m(m):
    return math.asin(math.sqrt(m))


def _sample_grid(lo, hi, n, include_lo):
    """n abscissae on [lo, hi]: half uniform, half clustered toward lo."""
    if n <= 1:
        return np.array([hi])
    n_geo = n // 2
    n_uni = n - n_geo
    if include_lo:
        uni = np.linspace(lo, hi, n_uni)
    else:
        uni = np.linspace(lo, hi, n_uni + 1)[1:]
    geo = lo + (hi - lo) * np.logspace(-9, -0.3, n_geo)
    grid = np.unique(np.concatenate([uni, geo]))
    if not include_lo:
        grid = grid[grid > lo]
    return grid


def _energy_at(cell, two_L, cfg):
    """Energy on A, k = 0 where the transit time equals two_L."""
    [param] = _solve_a0(cell, two_L, cfg)
    return param.energy


def trace_branch(cell, branch, n_points, L_max, cfg=DEFAULT_CONFIG, energy_max=A_ENERGY_MAX):
    """Sample ``branch`` up to half-length ``L_max``.

    Samples are ordered by increasing energy.  The critical orbit closing the
    branch is the first sample whenever its half-length does not exceed
    ``L_max``; the saddle-node, if any, is always included.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if not L_max > 0:
        raise DomainError("L_max must be positive")
    two_L_max = 2.0 * L_max
    t_crit = critical_time(cell, branch, cfg)
    crit_in = t_crit <= two_L_max

    if branch.kind is BranchKind.A and branch.k == 0:
        e_crit = -math.cos(2.0 * cell.phi_max)
        e_lo = e_crit if crit_in else _energy_at(cell, two_L_max, cfg)
        energies = _sample_grid(e_lo, energy_max, n_points - int(crit_in), include_lo=False)
        points = [_classified(cell, branch, critical_point(cell, branch, cfg), cfg)] if crit_in else []
        for e in energies:
            p = OrbitParam.from_energy(float(e))
            if p.is_closed and p.value <= cell.phi_max:
                continue
            points.append(_finish(cell, branch, p, cfg))
        return points

    m_crit = math.sin(cell.phi_max) ** 2
    cap = cfg.alpha_cap
    t_cap = _closed_time(cell, branch, cap, cfg)
    extra = []
    if is_folded(cell, branch):
        sn = find_saddle_node(cell, branch, cfg)
        if sn.T_min > two_L_max:
            return []
        extra.append(sn.param_at_min)
        start = sn.alpha
        if crit_in:
            m_lo = m_crit
        else:
            m_lo = math.sin(_solve_closed(cell, branch, two_L_max, cell.phi_max + _EDGE, sn.alpha, cfg).value) ** 2
    else:
        if not crit_in:
            return []
        start = cell.phi_max + _EDGE
        m_lo = m_crit
    if two_L_max >= t_cap:
        alpha_hi = cap
    else:
        alpha_hi = _solve_closed(cell, branch, two_L_max, start, cap, cfg).value
    m_hi = math.sin(alpha_hi) ** 2

    points = [_classified(cell, branch, critical_point(cell, branch, cfg), cfg)] if crit_in else []
    n_grid = max(1, n_points - len(points) - len(extra))
    params = [OrbitParam.closed(_alpha_of_m(m)) for m in _sample_grid(m_lo, m_hi, n_grid, False)]
    params = [p for p in params if cell.phi_max < p.value <= cap]
    params.extend(extra)
    params.sort(key=lambda p: p.value)
    seen = set()
    for p in params:
        if p.value in seen:
            continue
        seen.add(p.value)
        points.append(_finish(cell, branch, p, cfg))
    return points


def _classified(cell, branch, point, cfg):
    from .stability import classify

    return replace(point, stability=classify(cell, branch, point.param, cfg).verdict)


def _finish(cell, branch, param, cfg):
    return _classified(cell, branch, make_point(cell, branch, param, cfg), cfg)


def mirror_diagram(diagram):
    """Diagram of the mirrored cell, built point by point from ``diagram``."""
    return Diagram(
        cell=mirror(diagram.cell),
        points={mirror_branch(b): [mirror_point(p) for p in pts] for b, pts in diagram.points.items()},
        criticals=list(diagram.criticals),
        saddles=[replace(s, branch=mirror_branch(s.branch)) for s in diagram.saddles],
        symmetric_overlay=diagram.symmetric_overlay,
        settings=dict(diagram.settings),
    )


def build_diagram(cell, k_max=0, L_max=8.0, n_points=100, overlay_symmetric=False, cfg=DEFAULT_CONFIG):
    """Trace every branch with winding 0..k_max and collect the landmarks.

    A cell with phi0 > phi1 is built from its mirror image, which is the
    orientation the tracing is written for.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if not cell.canonical:
        return mirror_diagram(build_diagram(mirror(cell), k_max, L_max, n_points, overlay_symmetric, cfg))

    points = {}
    saddles = []
    for branch in all_branches(k_max):
        points[branch] = trace_branch(cell, branch, n_points, L_max, cfg)
        if is_folded(cell, branch):
            saddles.append(find_saddle_node(cell, branch, cfg))
        log.info("traced %s: %d points", branch, len(points[branch]))
    criticals = [critical_times(cell, k, cfg) for k in range(k_max + 1)]
    overlay = None
    if overlay_symmetric and not cell.symmetric:
        mid = 0.5 * (cell.phi0 + cell.phi1)
        overlay = build_diagram(CellParams(mid, mid), k_max, L_max, n_points, False, cfg)
    settings = dict(
        k_max=k_max,
        L_max=L_max,
        n_points=n_points,
        overlay_symmetric=overlay_symmetric,
        tolerances=asdict(cfg),
    )
    return Diagram(cell, points, criticals, saddles, overlay, settings)

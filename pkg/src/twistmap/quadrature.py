"""Adaptive Gauss-Kronrod (7/15) quadrature used by the time-map kernels.

The integrands handled here are bounded but may carry a sharp peak at one
end of the interval (orbits close to the separatrix, or a boundary line close
to the turning point).  Callers pass initial breakpoints clustered toward the
peak with :func:`geometric_breaks`; the adaptive loop then bisects the
interval with the largest error estimate until the global tolerance is met.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "QuadratureError",
    "QuadConfig",
    "DEFAULT_CONFIG",
    "gauss_kronrod",
    "integrate",
    "geometric_breaks",
]


class DomainError(ValueError):
    """Argument outside the domain of a time-map or branch formula."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances for the time-map kernels.

    ``alpha_cap`` is the largest admissible amplitude; the quarter period
    diverges logarithmically at pi/2, so sweeps must stop short of it.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_subdivisions: int = 60
    alpha_cap: float = math.pi / 2 - 1e-9

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.alpha_cap < math.pi / 2:
            raise ValueError("alpha_cap must lie below pi/2")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_CONFIG = QuadConfig()

# Kronrod 15-point abscissae (positive half, descending) and weights; the
# Gauss 7-point rule uses every second abscissa.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[1:7:2] = _WG[:3]
_GWEIGHTS[7] = _WG[3]
_GWEIGHTS[9:14:2] = _WG[2::-1]


def gauss_kronrod(f, a, b):
    """Single 15-point Kronrod estimate on [a, b] with its error estimate.

    ``f`` must accept a numpy array of abscissae.
    """
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    fx = f(center + half * _NODES)
    kron = half * np.dot(_KWEIGHTS, fx)
    gauss = half * np.dot(_GWEIGHTS, fx)
    resabs = abs(half) * np.dot(_KWEIGHTS, np.abs(fx))
    resasc = abs(half) * np.dot(_KWEIGHTS, np.abs(fx - kron / (2 * half)))
    err = abs(kron - gauss)
    # QUADPACK's sharpened error estimate
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * np.finfo(float).eps):
        err = max(50 * np.finfo(float).eps * resabs, err)
    return float(kron), float(err)


def integrate(f, a, b, points=None, cfg=DEFAULT_CONFIG):
    """Globally adaptive integral of ``f`` over [a, b].

    ``points`` are optional interior breakpoints.  Returns ``(value, error)``
    and raises :class:`QuadratureError` if more than ``cfg.max_subdivisions``
    bisections are needed.
    """
    if b == a:
        return 0.0, 0.0
    edges = [a]
    if points is not None:
        edges.extend(p for p in sorted(points) if a < p < b)
    edges.append(b)

    heap = []
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = gauss_kronrod(f, lo, hi)
        total += val
        total_err += err
        heapq.heappush(heap, (-err, lo, hi, val))

    splits = 0
    while total_err > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        if splits >= cfg.max_subdivisions:
            raise QuadratureError(
                f"no convergence after {splits} subdivisions "
                f"(estimate {total!r}, error {total_err:.3e})"
            )
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # interval at machine resolution; accept what we have
            break
        v1, e1 = gauss_kronrod(f, lo, mid)
        v2, e2 = gauss_kronrod(f, mid, hi)
        total += v1 + v2 - val
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        splits += 1

    # re-sum to shed the rounding accumulated by the running updates
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return total, total_err


def geometric_breaks(a, b, scale, ratio=4.0, toward="b"):
    """Breakpoints in (a, b) clustered geometrically toward one endpoint.

    The distances from that endpoint are ``scale * ratio**j`` for as long as
    they fit inside the interval; an empty list is returned when ``scale`` is
    not small compared with the interval length.
    """
    width = b - a
    if not scale > 0 or scale >= width / ratio:
        return []
    out = []
    d = scale
    while d < width / ratio:
        out.append(b - d if toward == "b" else a + d)
        d *= ratio
    return sorted(out)

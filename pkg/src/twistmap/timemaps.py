"""Time-maps of the pendulum-type system x' = y, y' = -sin 2x.

Orbits lie on level sets of the energy ``V(x, y) = y**2 - cos(2x)``.  A closed
orbit is labelled by its amplitude ``alpha`` (it crosses the x-axis at
``(alpha, 0)``); an orbit on or above the separatrix is labelled by the
height ``beta >= sqrt(2)`` at which it crosses the y-axis.  On closed orbits
the two labels are related by ``beta = sqrt(2) * sin(alpha)``.

All three maps are evaluated after the substitution
``sin x = sin(alpha) sin(theta)`` (or the analogous scaling by ``beta``),
which turns the square-root endpoint singularity into a bounded integrand.
Derivatives are taken under the integral sign with respect to the modular
variable ``m = sin(alpha)**2``; the ``*_mderiv`` helpers expose those forms
directly and the ``d_*`` functions chain them back to ``alpha``.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import (
    DEFAULT_CONFIG,
    DomainError,
    QuadConfig,
    geometric_breaks,
    integrate,
)

__all__ = [
    "SQRT2",
    "Regime",
    "CellParams",
    "OrbitParam",
    "beta_of_alpha",
    "alpha_of_beta",
    "quarter_period",
    "time_to_line",
    "time_above",
    "d_quarter_period",
    "d_time_to_line_dalpha",
    "quarter_period_mderiv",
    "time_to_line_mderiv",
]

SQRT2 = math.sqrt(2.0)
HALF_PI = 0.5 * math.pi

# coefficient of the n-th derivative of (1 - u)**(-1/2): (1/2)(3/2)...((2n-1)/2)
_RISING = (1.0, 0.5, 0.75)


class Regime(enum.Enum):
    CLOSED = "Closed"
    OPEN = "Open"


@dataclass(frozen=True)
class CellParams:
    """Boundary angles of the cell: x(-L) = -phi0 and x(L) = phi1."""

    phi0: float
    phi1: float

    def __post_init__(self):
        for name in ("phi0", "phi1"):
            v = getattr(self, name)
            if not 0.0 < v < HALF_PI:
                raise DomainError(f"{name}={v!r} outside (0, pi/2)")

    @property
    def ordering(self):
        """-1, 0 or +1 according to phi0 <, =, > phi1."""
        return (self.phi0 > self.phi1) - (self.phi0 < self.phi1)

    @property
    def symmetric(self):
        return self.phi0 == self.phi1

    @property
    def canonical(self):
        return self.phi0 <= self.phi1

    @property
    def phi_max(self):
        return max(self.phi0, self.phi1)

    @property
    def phi_min(self):
        return min(self.phi0, self.phi1)


@dataclass(frozen=True)
class OrbitParam:
    """Energy-level coordinate of an orbit.

    ``value`` is the amplitude alpha for closed orbits and the crossing
    height beta for open ones.  ``energy`` is derived and kept as a cache.
    """

    regime: Regime
    value: float
    energy: float = field(init=False)

    def __post_init__(self):
        if self.regime is Regime.CLOSED:
            if not 0.0 < self.value < HALF_PI:
                raise DomainError(f"amplitude {self.value!r} outside (0, pi/2)")
            energy = -math.cos(2.0 * self.value)
        else:
            if not self.value >= SQRT2:
                raise DomainError(f"crossing height {self.value!r} below sqrt(2)")
            energy = self.value * self.value - 1.0
        object.__setattr__(self, "energy", energy)

    @classmethod
    def closed(cls, alpha):
        return cls(Regime.CLOSED, float(alpha))

    @classmethod
    def open(cls, beta):
        return cls(Regime.OPEN, float(beta))

    @classmethod
    def from_energy(cls, energy):
        """Closed orbit for energy in (-1, 1), open orbit for energy >= 1."""
        if energy >= 1.0:
            return cls.open(math.sqrt(energy + 1.0))
        if energy <= -1.0:
            raise DomainError(f"energy {energy!r} at or below the rest state")
        return cls.closed(0.5 * math.acos(-energy))

    @property
    def is_closed(self):
        return self.regime is Regime.CLOSED

    @property
    def alpha(self):
        if not self.is_closed:
            raise DomainError("open orbits have no amplitude")
        return self.value

    @property
    def beta(self):
        if self.is_closed:
            return beta_of_alpha(self.value)
        return self.value

    @property
    def modulus(self):
        """sin(alpha)**2 for closed orbits; 1 on and above the separatrix."""
        if self.is_closed:
            return math.sin(self.value) ** 2
        return 1.0

    def gap(self, phi):
        """V(phi, 0) gap ``E + cos(2 phi)``, i.e. y**2 on the line x = +-phi."""
        if self.is_closed:
            a = self.value
            return 2.0 * math.sin(a - phi) * math.sin(a + phi)
        return self.value * self.value - 2.0 * math.sin(phi) ** 2


def beta_of_alpha(alpha):
    if not 0.0 < alpha < HALF_PI:
        raise DomainError(f"alpha={alpha!r} outside (0, pi/2)")
    return SQRT2 * math.sin(alpha)


def alpha_of_beta(beta):
    if not 0.0 < beta < SQRT2:
        raise DomainError(f"beta={beta!r} outside (0, sqrt(2)); no closed orbit")
    return math.asin(beta / SQRT2)


def _check_alpha(alpha, cfg):
    if not 0.0 < alpha <= cfg.alpha_cap:
        raise DomainError(f"alpha={alpha!r} outside (0, {cfg.alpha_cap!r}]")


def _theta_integral(c, lower, order, cfg):
    """int_0^(pi/2 - lower) sin(t)**(2n) / (cos(t)**2 + c**2 sin(t)**2)**(n + 1/2) dt.

    Evaluated in the complementary angle u = pi/2 - t, so that the peak of
    width ``c`` sits at u = 0 where the abscissae carry full relative accuracy.
    """
    c2 = c * c
    p = order + 0.5

    def f(u):
        cu2 = np.cos(u) ** 2
        base = np.sin(u) ** 2 + c2 * cu2
        if order == 0:
            return 1.0 / np.sqrt(base)
        return cu2 ** order / base ** p

    pts = geometric_breaks(lower, HALF_PI, max(lower, c), toward="a")
    val, _ = integrate(f, lower, HALF_PI, points=pts, cfg=cfg)
    return val


def quarter_period_mderiv(alpha, order=0, cfg=DEFAULT_CONFIG):
    """d^n/dm^n of the quarter period, m = sin(alpha)**2, for n = 0, 1, 2."""
    _check_alpha(alpha, cfg)
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    c = math.cos(alpha)
    return _RISING[order] / SQRT2 * _theta_integral(c, 0.0, order, cfg)


def quarter_period(alpha, cfg=DEFAULT_CONFIG):
    """Quarter period T(alpha) of the closed orbit through (alpha, 0)."""
    return quarter_period_mderiv(alpha, 0, cfg)


def d_quarter_period(alpha, cfg=DEFAULT_CONFIG):
    """dT/dalpha, positive on (0, pi/2)."""
    return quarter_period_mderiv(alpha, 1, cfg) * math.sin(2.0 * alpha)


def _check_line(alpha, phi, cfg, strict=False):
    _check_alpha(alpha, cfg)
    if not phi > 0.0:
        raise DomainError(f"phi={phi!r} must be positive")
    if phi > alpha or (strict and phi == alpha):
        raise DomainError(f"phi={phi!r} beyond the turning point alpha={alpha!r}")


def time_to_line(alpha, phi, cfg=DEFAULT_CONFIG):
    """T1(alpha, phi): time from the y-axis to the line x = phi on orbit alpha."""
    _check_line(alpha, phi, cfg)
    if alpha == phi:
        return quarter_period(phi, cfg)
    c = math.cos(alpha)
    # pi/2 minus the transformed upper limit; atan2 keeps it accurate near
    # the turning point
    lower = math.atan2(math.sqrt(math.sin(alpha - phi) * math.sin(alpha + phi)), math.sin(phi))
    return _theta_integral(c, lower, 0, cfg) / SQRT2


def time_to_line_mderiv(alpha, phi, order=0, cfg=DEFAULT_CONFIG):
    """d^n/dm^n of T1(., phi) at m = sin(alpha)**2, n = 0, 1, 2.

    Uses int_0^phi (m - sin(x)**2)**(-n - 1/2) dx, which is bounded for
    phi < alpha; the peak at x = phi is resolved with geometric breakpoints.
    """
    if order == 0:
        return time_to_line(alpha, phi, cfg)
    if order not in (1, 2):
        raise ValueError("order must be 0, 1 or 2")
    _check_line(alpha, phi, cfg, strict=True)
    p = order + 0.5
    gap = alpha - phi
    total = alpha + phi

    # w = phi - x is the distance to the peak; alpha - x = gap + w exactly
    def f(w):
        return (np.sin(gap + w) * np.sin(total - w)) ** (-p)

    pts = geometric_breaks(0.0, phi, gap, toward="a")
    val, _ = integrate(f, 0.0, phi, points=pts, cfg=cfg)
    return (-1) ** order * _RISING[order] / SQRT2 * val


def d_time_to_line_dalpha(alpha, phi, cfg=DEFAULT_CONFIG):
    """dT1/dalpha at fixed phi; negative for 0 < phi < alpha."""
    return time_to_line_mderiv(alpha, phi, 1, cfg) * math.sin(2.0 * alpha)


def time_above(beta, phi, cfg=DEFAULT_CONFIG):
    """T2(beta, phi) for orbits crossing the y-axis at height beta >= sqrt(2)."""
    if not beta >= SQRT2:
        raise DomainError(
            f"beta={beta!r} below sqrt(2); use time_to_line(alpha_of_beta(beta), phi)"
        )
    if not 0.0 < phi <= HALF_PI:
        raise DomainError(f"phi={phi!r} outside (0, pi/2]")
    g = (beta - SQRT2) * (beta + SQRT2)
    if g == 0.0 and phi == HALF_PI:
        return math.inf

    # complementary angle u = pi/2 - x puts the separatrix peak at u = 0
    def f(u):
        return 1.0 / np.sqrt(g + 2.0 * np.sin(u) ** 2)

    lower = HALF_PI - phi
    pts = geometric_breaks(lower, HALF_PI, max(lower, math.sqrt(0.5 * g)), toward="a")
    val, _ = integrate(f, lower, HALF_PI, points=pts, cfg=cfg)
    return val

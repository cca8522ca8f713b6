"""Independent checks of the time-map engine.

Nothing here calls the Gauss-Kronrod kernels of :mod:`twistmap.timemaps`.
The three maps are recomputed from their raw integrands with QUADPACK,
branch points are checked by shooting the initial value problem across the
cell, and stability verdicts are tested by relaxing the gradient flow

    phi_s = phi_zz + lam * sin(phi) * cos(phi),   0 < z < 1,

from a slightly perturbed equilibrium.
"""

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.linalg import solve_banded

from .quadrature import DomainError, QuadratureError

__all__ = [
    "OracleMap",
    "Outcome",
    "OrbitTrace",
    "RelaxationRun",
    "quad_oracle",
    "integrate_orbit",
    "shoot",
    "shoot_check",
    "equilibrium_profile",
    "relax",
    "SHOOT_TOL",
    "DRIFT_TOL",
]

SHOOT_TOL = 1e-6
DRIFT_TOL = 1e-8


class OracleMap(enum.Enum):
    T = "T"
    T1 = "T1"
    T2 = "T2"


# ---------------------------------------------------------------------------
# brute-force quadrature


def _quad(f, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, _ = quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=200, **kw)
        except IntegrationWarning as exc:
            raise QuadratureError(f"QUADPACK failed on [{a!r}, {b!r}]: {exc}") from exc
    return val


def _dyadic_sum(f, a, b, split_depth, first=None):
    """Integral of f over [a, b] on pieces cut dyadically toward ``a``.

    The innermost piece [a, a + (b - a)/2**split_depth] is handed to
    ``first`` when given, so that a singular endpoint can carry a weight.
    """
    w = b - a
    edges = [a + w * 0.5 ** j for j in range(split_depth, -1, -1)]
    edges[-1] = b
    head = first(a, edges[0]) if first is not None else _quad(f, a, edges[0])
    parts = [head] + [_quad(f, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    return math.fsum(parts)


def _closed_integrand(alpha):
    """x -> 1/sqrt(cos 2x - cos 2alpha) written in d = alpha - x.

    cos 2x - cos 2alpha = 2 sin(d) sin(2 alpha - d); the second factor is
    expanded so that nothing cancels when alpha is close to pi/2.
    """
    s2, c2 = math.sin(2.0 * alpha), math.cos(2.0 * alpha)

    def far(d):
        return s2 * math.cos(d) - c2 * math.sin(d)

    def f(d):
        return 1.0 / math.sqrt(2.0 * math.sin(d) * far(d))

    def weighted(d):
        # f(d) * sqrt(d), bounded at d = 0
        if d == 0.0:
            return 1.0 / math.sqrt(2.0 * s2)
        return math.sqrt(d / (2.0 * math.sin(d) * far(d)))

    return f, weighted


def quad_oracle(which, args, split_depth=30):
    """Raw-integrand value of T(alpha), T1(alpha, phi) or T2(beta, phi).

    ``args`` is ``(alpha,)``, ``(alpha, phi)`` or ``(beta, phi)``.  The
    interval is cut dyadically toward the upper limit x = phi (or alpha),
    where every integrand here is singular or sharply peaked.  For T and
    T1 the integration runs in the distance d = alpha - x to the turning
    point, which keeps full relative precision next to it.
    """
    which = OracleMap(which)
    if split_depth < 1:
        raise ValueError("split_depth must be >= 1")

    if which is OracleMap.T:
        (alpha,) = args
        if not 0.0 < alpha < math.pi / 2:
            raise DomainError(f"alpha={alpha!r} outside (0, pi/2)")
        f, weighted = _closed_integrand(alpha)

        def first(lo, hi):
            # the d**(-1/2) singularity goes into QUADPACK's algebraic weight
            with warnings.catch_warnings():
                warnings.simplefilter("error", IntegrationWarning)
                try:
                    val, _ = quad(weighted, lo, hi, weight="alg", wvar=(-0.5, 0.0), epsabs=0.0, epsrel=1e-12)
                except IntegrationWarning as exc:
                    raise QuadratureError(f"weighted piece failed: {exc}") from exc
            return val

        return _dyadic_sum(f, 0.0, alpha, split_depth, first)

    if which is OracleMap.T1:
        alpha, phi = args
        if not 0.0 < phi <= alpha < math.pi / 2:
            raise DomainError(f"need 0 < phi <= alpha < pi/2, got alpha={alpha!r}, phi={phi!r}")
        if phi == alpha:
            return quad_oracle(OracleMap.T, (alpha,), split_depth)
        f, _ = _closed_integrand(alpha)
        return _dyadic_sum(f, alpha - phi, alpha, split_depth)

    beta, phi = args
    if not beta >= math.sqrt(2.0):
        raise DomainError(f"beta={beta!r} below sqrt(2)")
    if not 0.0 < phi <= math.pi / 2:
        raise DomainError(f"phi={phi!r} outside (0, pi/2]")
    g = beta * beta - 2.0

    def f(x):
        return 1.0 / math.sqrt(g + 2.0 * math.cos(x) ** 2)

    # reflected so that the peak at x = phi sits at the lower end u = 0
    return _dyadic_sum(lambda u: f(phi - u), 0.0, phi, split_depth)


# ---------------------------------------------------------------------------
# phase-plane integration


def _rhs(t, z):
    return [z[1], -math.sin(2.0 * z[0])]


def _energy(x, y):
    return y * y - np.cos(2.0 * x)


@dataclass(frozen=True)
class OrbitTrace:
    """Samples of an orbit of x' = y, y' = -sin 2x."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    energy_drift: float

    @property
    def samples(self):
        return np.column_stack([self.t, self.x, self.y])

    def sign_changes(self, floor=1e-7):
        """Sign changes of y, ignoring samples with |y| <= floor.

        The floor keeps a turning point that sits exactly on an end of the
        interval (critical orbits) from being counted through rounding.
        """
        y = self.y[np.abs(self.y) > floor]
        return int(np.count_nonzero(np.diff(np.sign(y))))


def integrate_orbit(start, duration, tol=1e-12, t0=0.0, n_samples=2001):
    """Integrate from ``start = (x0, y0)`` at time ``t0`` for ``duration``.

    Uses DOP853 with rtol = atol = ``tol``; samples are taken from the
    dense output on a uniform grid that includes both ends.
    """
    if not duration > 0:
        raise ValueError("duration must be positive")
    x0, y0 = map(float, start)
    t1 = t0 + duration
    sol = solve_ivp(_rhs, (t0, t1), [x0, y0], method="DOP853", rtol=tol, atol=tol, dense_output=True)
    if not sol.success:
        raise ArithmeticError(f"orbit integration failed: {sol.message}")
    t = np.linspace(t0, t1, n_samples)
    x, y = sol.sol(t)
    # the grid end coincides with the last step, take the stepped value
    x[-1], y[-1] = sol.y[:, -1]
    drift = float(np.max(np.abs(_energy(x, y) - _energy(x0, y0))))
    return OrbitTrace(t, x, y, drift)


def _project(x, y, level):
    """One Newton step along grad V back onto the level set V = level."""
    gx, gy = 2.0 * math.sin(2.0 * x), 2.0 * y
    g2 = gx * gx + gy * gy
    if g2 == 0.0:
        return x, y
    d = (y * y - math.cos(2.0 * x) - level) / g2
    return x - d * gx, y - d * gy


def shoot(cell, y_minus, L, rtol=2.5e-14, atol=1e-15, segment=0.5):
    """State (x, y) at t = L of the orbit leaving (-phi0, y_minus) at t = -L.

    The flow is integrated with DOP853 in pieces of length ``segment``;
    after each piece the state is projected back onto the energy level of
    the initial point.  Near the separatrix the transit time depends on the
    energy through its distance to 1, so unchecked drift of order 1e-14
    would otherwise be amplified by 1/(1 - E).
    """
    x, y = -cell.phi0, float(y_minus)
    level = y * y - math.cos(2.0 * x)
    n = max(1, math.ceil(2.0 * L / segment))
    edges = np.linspace(-L, L, n + 1)
    for t0, t1 in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(_rhs, (t0, t1), [x, y], method="DOP853", rtol=rtol, atol=atol)
        if not sol.success:
            raise ArithmeticError(f"shooting failed: {sol.message}")
        x, y = _project(sol.y[0, -1], sol.y[1, -1], level)
    return x, y


def shoot_check(cell, point, **kw):
    """|x(L) - phi1| + |y(L) - y_plus| after shooting from (-phi0, y_minus)."""
    x_end, y_end = shoot(cell, point.y_minus, point.L, **kw)
    return abs(x_end - cell.phi1) + abs(y_end - point.y_plus)


def equilibrium_profile(cell, point, n, tol=1e-13):
    """phi(z_i) = x(t_i) on n + 2 nodes z_i of [0, 1], with t = 2L (z - 1/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    z = np.linspace(0.0, 1.0, n + 2)
    t = 2.0 * point.L * (z - 0.5)
    sol = solve_ivp(
        _rhs,
        (-point.L, point.L),
        [-cell.phi0, point.y_minus],
        method="DOP853",
        rtol=tol,
        atol=tol,
        t_eval=t,
    )
    if not sol.success:
        raise ArithmeticError(f"profile integration failed: {sol.message}")
    phi = sol.y[0].copy()
    phi[0] = -cell.phi0
    phi[-1] = cell.phi1
    return z, phi


# ---------------------------------------------------------------------------
# relaxation of the gradient flow


class Outcome(enum.Enum):
    RETURNED = "ReturnedToStart"
    ESCAPED = "EscapedToOther"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RelaxationRun:
    L: float
    lam: float
    grid_size: int
    z: np.ndarray
    profile_initial: np.ndarray
    profile_final: np.ndarray
    t_final: float
    distance: float
    outcome: Outcome


def _residual(u, h, half_lam):
    r = (u[:-2] - 2.0 * u[1:-1] + u[2:]) / (h * h)
    return r + half_lam * np.sin(2.0 * u[1:-1])


def _polish(u, h, half_lam, max_iter=20):
    """Newton iterations on the discrete steady state, boundary nodes fixed."""
    u = u.copy()
    n = u.size - 2
    off = np.full(n, 1.0 / (h * h))
    for _ in range(max_iter):
        r = _residual(u, h, half_lam)
        if np.max(np.abs(r)) < 1e-11:
            break
        ab = np.zeros((3, n))
        ab[0, 1:] = off[1:]
        ab[1] = -2.0 / (h * h) + 2.0 * half_lam * np.cos(2.0 * u[1:-1])
        ab[2, :-1] = off[:-1]
        u[1:-1] -= solve_banded((1, 1), ab, r)
    else:
        raise ArithmeticError("discrete equilibrium did not converge")
    return u


@njit(cache=True)
def _march(u, h, half_lam, dt, n_steps, ref, escape, check_every):
    """Explicit Euler for u_s = u_zz + half_lam sin 2u with pinned ends."""
    n = u.size
    new = u.copy()
    c = dt / (h * h)
    done = 0
    for step in range(n_steps):
        for i in range(1, n - 1):
            new[i] = u[i] + c * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + dt * half_lam * math.sin(2.0 * u[i])
        for i in range(1, n - 1):
            u[i] = new[i]
        done = step + 1
        if done % check_every == 0:
            dist = 0.0
            for i in range(n):
                d = abs(u[i] - ref[i])
                if d > dist:
                    dist = d
            if dist > escape:
                break
    return done


def relax(cell, point, perturbation=1e-3, t_final=50.0, grid_size=201, max_steps=200_000_000):
    """Perturb an equilibrium by ``perturbation * sin(pi z)`` and let it relax.

    The run stops early once the profile is clearly gone (sup-distance above
    ten times the escape threshold or 0.5, whichever is larger).
    """
    if grid_size < 51:
        raise ValueError("grid_size must be >= 51")
    if not 0.0 < abs(perturbation) <= 0.05:
        raise ValueError("perturbation amplitude must lie in (0, 0.05]")
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    lam = 8.0 * point.L ** 2
    half_lam = 0.5 * lam
    h = 1.0 / (grid_size + 1)
    dt = 0.4 * h * h
    n_steps = int(math.ceil(t_final / dt))
    if n_steps > max_steps:
        raise OverflowError(f"{n_steps} explicit steps exceed max_steps={max_steps}")

    z, profile = equilibrium_profile(cell, point, grid_size)
    ref = _polish(profile, h, half_lam)
    start = ref + perturbation * np.sin(np.pi * z)
    start[0], start[-1] = -cell.phi0, cell.phi1

    pert = abs(perturbation)
    u = start.copy()
    done = _march(u, h, half_lam, dt, n_steps, ref, max(50.0 * pert, 0.5), 64)
    dist = float(np.max(np.abs(u - ref)))
    if dist < pert / 10.0:
        outcome = Outcome.RETURNED
    elif dist > 5.0 * pert:
        outcome = Outcome.ESCAPED
    else:
        outcome = Outcome.INCONCLUSIVE
    return RelaxationRun(point.L, lam, grid_size, z, start, u, done * dt, dist, outcome)

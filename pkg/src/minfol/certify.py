"""Minimality certificates: the Hardy-type identity, the pointwise and
L^{n/2} curvature conditions, and the second-variation quadratic form."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .errors import InvalidParameterError, MinfolError
from .odeflow import Trajectory
from .potential import BumpFunction, RadialPotential, u_bound_function

_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-10, limit=400)


@dataclass(frozen=True)
class SupportedFunction:
    """A scalar test function with derivative and compact support interval."""

    value: Callable
    derivative: Callable
    support: tuple[float, float]


def as_test_function(xi) -> SupportedFunction:
    if isinstance(xi, SupportedFunction):
        return xi
    if isinstance(xi, BumpFunction):
        return SupportedFunction(value=xi.value, derivative=xi.derivative,
                                 support=xi.support)
    raise InvalidParameterError("expected a BumpFunction or SupportedFunction")


def sphere_volume(n: int) -> float:
    """Volume |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2) of the unit n-sphere."""
    if n < 1:
        raise InvalidParameterError("sphere dimension must be >= 1")
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def sphere_area(n: int) -> float:
    """Surface area |S^{n-1}| of the unit sphere in R^n."""
    return sphere_volume(n - 1)


def sobolev_constant(n: int) -> float:
    """S_n = n(n-2)/4 * |S^n|: the threshold of the L^{n/2} condition."""
    if n < 3:
        raise InvalidParameterError("S_n requires n >= 3")
    return n * (n - 2) / 4.0 * sphere_volume(n)


def hardy_identity_check(xi, n: int, r1: float, r2: float,
                         dxi: Optional[Callable] = None) -> tuple[float, float]:
    """Both sides of the weighted Hardy identity on [r1, r2], xi(r2) = 0.

    LHS = int r^{n-1} (xi'^2 - ((n-2)/2)^2 xi^2 / r^2) dr,
    RHS = (n-2)/2 * phi(r1)^2 + int r phi'^2 dr with phi = xi r^{n/2-1}.
    The identity forces LHS = RHS >= 0.
    """
    if n < 3:
        raise InvalidParameterError("identity requires n >= 3")
    if not (0 <= r1 < r2 < math.inf):
        raise InvalidParameterError("need 0 <= r1 < r2 < inf")
    if callable(xi) and dxi is not None:
        val, dval = xi, dxi
    else:
        tf = as_test_function(xi)
        val, dval = tf.value, tf.derivative
    if abs(float(val(r2))) > 1e-10:
        raise InvalidParameterError("xi(r2) must vanish")

    c = ((n - 2) / 2.0) ** 2

    def lhs_integrand(r):
        x = float(val(r))
        dx = float(dval(r))
        return r ** (n - 1) * dx * dx - c * r ** (n - 3) * x * x

    def phi(r):
        return float(val(r)) * r ** (n / 2.0 - 1.0)

    def dphi(r):
        return (float(dval(r)) * r ** (n / 2.0 - 1.0)
                + (n / 2.0 - 1.0) * float(val(r)) * r ** (n / 2.0 - 2.0))

    def rhs_integrand(r):
        d = dphi(r)
        return r * d * d

    lhs = quad(lhs_integrand, r1, r2, **_QUAD_OPTS)[0]
    boundary = (n - 2) / 2.0 * phi(r1) ** 2 if r1 > 0 else 0.0
    rhs = boundary + quad(rhs_integrand, r1, r2, **_QUAD_OPTS)[0]
    return lhs, rhs


@dataclass
class Certificate:
    condition: str  # "A" | "B"
    n: int
    margin: float
    verdict: str    # "certified" | "not-certified"
    x0_offset: float = 0.0
    grid_points: int = 0
    norm_value: Optional[float] = None
    threshold: Optional[float] = None

    def to_dict(self):
        return asdict(self)


def check_condition_A(pot: RadialPotential, n: int, x0_offset: float = 0.0,
                      grid_points: int = 2048,
                      envelope=None) -> Certificate:
    """Pointwise condition: U(r) <= ((n-2)/2)^2 / dist^2 over the support,
    worst-casing the distance to x0 on each sphere as r + |offset|."""
    if n < 3:
        raise InvalidParameterError("condition A requires n >= 3")
    env = envelope if envelope is not None else u_bound_function(pot, n)
    r_lo = pot.r_inner if pot.r_inner else pot.r_outer * 1e-6
    rr = np.linspace(r_lo, pot.r_outer, grid_points)
    c = ((n - 2) / 2.0) ** 2
    rhs = c / (rr + abs(x0_offset)) ** 2
    lhs = env(rr)
    margin = float(np.min(rhs - lhs))
    return Certificate(condition="A", n=n, margin=margin,
                       verdict="certified" if margin >= 0 else "not-certified",
                       x0_offset=x0_offset, grid_points=grid_points)


def check_condition_B(pot: RadialPotential, n: int,
                      envelope=None) -> Certificate:
    """Integral condition: ||U||_{n/2} <= S_n = n(n-2)/4 |S^n|."""
    if n < 3:
        raise InvalidParameterError("condition B requires n >= 3")
    env = envelope if envelope is not None else u_bound_function(pot, n)
    r_lo = pot.r_inner if pot.r_inner else 0.0

    def integrand(r):
        return float(env(r)) ** (n / 2.0) * r ** (n - 1)

    integral = quad(integrand, r_lo, pot.r_outer, **_QUAD_OPTS)[0]
    norm = (sphere_area(n) * integral) ** (2.0 / n)
    s_n = sobolev_constant(n)
    margin = s_n - norm
    return Certificate(condition="B", n=n, margin=margin,
                       verdict="certified" if margin >= 0 else "not-certified",
                       norm_value=norm, threshold=s_n)


def second_variation(traj: Trajectory, xi, pot: RadialPotential, n: int) -> float:
    """Q(xi) = int r^{n-1} (xi'^2 - V''_uu(u(r), r) xi^2) dr over the test
    function's support, which must lie inside the trajectory's r-range."""
    tf = as_test_function(xi)
    a, b = tf.support
    r_lo = math.exp(traj.t_min)
    r_hi = math.exp(traj.t_max)
    if a < r_lo - 1e-12 or b > r_hi + 1e-12 or a <= 0:
        raise MinfolError(
            "test function support (%g, %g) outside trajectory range (%g, %g)"
            % (a, b, r_lo, r_hi))

    def integrand(r):
        x = float(tf.value(r))
        dx = float(tf.derivative(r))
        u = float(traj.u_of_r(r))
        return r ** (n - 1) * (dx * dx - float(pot.d2v_duu(u, r)) * x * x)

    return quad(integrand, a, b, **_QUAD_OPTS)[0]


def energy_gap_lower_bound(xi, envelope, n: int) -> float:
    """Action-gap bound 1/2 |S^{n-1}| int r^{n-1} (xi'^2 - U(r) xi^2) dr."""
    tf = as_test_function(xi)
    a, b = tf.support

    def integrand(r):
        x = float(tf.value(r))
        dx = float(tf.derivative(r))
        return r ** (n - 1) * (dx * dx - float(envelope(r)) * x * x)

    return 0.5 * sphere_area(n) * quad(integrand, max(a, 0.0), b, **_QUAD_OPTS)[0]

"""Compactly supported potentials V(u, r) and their log-coordinate form W(u, t).

The log form substitutes r = e^t, so the support of W lies in the semi-strip
{|u| <= u_bound, t <= t_upper} and the curvature constant K = sqrt(sup W''_uu)
controls all Riccati estimates downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import InvalidParameterError, InvalidSupportError


def _profile_derivs(s: np.ndarray):
    """Smooth bump profile g(s) = exp(1 - 1/(1-s^2)) and derivatives g', g'', g'''.

    All four vanish identically for |s| >= 1.
    """
    s = np.asarray(s, dtype=float)
    g = np.zeros_like(s)
    g1 = np.zeros_like(s)
    g2 = np.zeros_like(s)
    g3 = np.zeros_like(s)
    m = np.abs(s) < 1.0
    if np.any(m):
        sm = s[m]
        q = 1.0 - sm * sm
        val = np.exp(1.0 - 1.0 / q)
        h1 = -2.0 * sm / q**2
        h2 = -2.0 * (1.0 + 3.0 * sm * sm) / q**3
        h3 = -24.0 * sm * (1.0 + sm * sm) / q**4
        g[m] = val
        g1[m] = h1 * val
        g2[m] = (h2 + h1 * h1) * val
        g3[m] = (h3 + 3.0 * h1 * h2 + h1**3) * val
    return g, g1, g2, g3


@dataclass(frozen=True)
class BumpFunction:
    """C^inf bump: amplitude * exp(1 - 1/(1-s^2)), s = (x - center)/width."""

    center: float
    width: float
    amplitude: float

    def __post_init__(self):
        if not self.width > 0:
            raise InvalidParameterError("bump width must be positive, got %r" % (self.width,))

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.width, self.center + self.width)

    def _s(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.width

    def value(self, x):
        g = _profile_derivs(self._s(x))[0]
        return self.amplitude * g

    __call__ = value

    def derivative(self, x):
        g1 = _profile_derivs(self._s(x))[1]
        return self.amplitude * g1 / self.width

    def second_derivative(self, x):
        g2 = _profile_derivs(self._s(x))[2]
        return self.amplitude * g2 / self.width**2

    def third_derivative(self, x):
        g3 = _profile_derivs(self._s(x))[3]
        return self.amplitude * g3 / self.width**3


def make_bump(center: float, width: float, amplitude: float) -> BumpFunction:
    """Construct a smooth compactly supported bump (raises on width <= 0)."""
    return BumpFunction(center=center, width=width, amplitude=amplitude)


@dataclass(frozen=True)
class RadialPotential:
    """V(u, r) with u-derivatives, an r-derivative, and declared support box.

    All evaluators are vectorized, pure, and return exactly 0 outside
    {|u| < u_bound, r_inner < r < r_outer}.
    """

    v: Callable
    dv_du: Callable
    d2v_duu: Callable
    dv_dr: Callable
    u_bound: float
    r_outer: float
    r_inner: Optional[float] = None


def zero_potential(u_bound: float = 1.0, r_inner: float = 1.0,
                   r_outer: float = math.e) -> RadialPotential:
    """The identically-zero potential with finite declared support bounds."""
    def zero(u, r):
        return np.zeros(np.broadcast(np.asarray(u, float), np.asarray(r, float)).shape)

    return RadialPotential(v=zero, dv_du=zero, d2v_duu=zero, dv_dr=zero,
                           u_bound=u_bound, r_outer=r_outer, r_inner=r_inner)


def product_potential(f: BumpFunction, g: BumpFunction) -> RadialPotential:
    """Test-family constructor V(u, r) = f(u) * g(r); g must live in r > 0."""
    if g.support[0] <= 0:
        raise InvalidSupportError(
            "radial factor support %r touches r <= 0" % (g.support,))

    def v(u, r):
        return f.value(u) * g.value(r)

    def dv_du(u, r):
        return f.derivative(u) * g.value(r)

    def d2v_duu(u, r):
        return f.second_derivative(u) * g.value(r)

    def dv_dr(u, r):
        return f.value(u) * g.derivative(r)

    return RadialPotential(v=v, dv_du=dv_du, d2v_duu=d2v_duu, dv_dr=dv_dr,
                           u_bound=abs(f.center) + f.width,
                           r_outer=g.support[1], r_inner=g.support[0])


def scale_potential(pot: RadialPotential, lam: float) -> RadialPotential:
    """lam * V with the same support box."""
    return RadialPotential(
        v=lambda u, r: lam * pot.v(u, r),
        dv_du=lambda u, r: lam * pot.dv_du(u, r),
        d2v_duu=lambda u, r: lam * pot.d2v_duu(u, r),
        dv_dr=lambda u, r: lam * pot.dv_dr(u, r),
        u_bound=pot.u_bound, r_outer=pot.r_outer, r_inner=pot.r_inner)


@dataclass(frozen=True)
class LogPotential:
    """W(u, t) = V(u, e^t) with support strip, time bound T and curvature K."""

    w: Callable
    dw_du: Callable
    d2w_duu: Callable
    dw_dt: Callable
    u_bound: float
    t_upper: float
    t_lower: float
    k_curvature: float
    radial: Optional[RadialPotential] = None


def _refine_max_1d(fun, lo, hi, x0):
    """Local bounded refinement of a grid argmax of `fun` on [lo, hi]."""
    span = (hi - lo) * 1e-2
    a, b = max(lo, x0 - span), min(hi, x0 + span)
    if b <= a:
        return x0, fun(x0)
    res = optimize.minimize_scalar(lambda x: -fun(x), bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-12})
    if -res.fun > fun(x0):
        return float(res.x), float(-res.fun)
    return x0, fun(x0)


def _curvature_sup(d2w_duu, u_bound, t_lower, t_upper, grid_density):
    """sup over the strip of max(W''_uu, 0): grid scan + local refinement."""
    uu = np.linspace(-u_bound, u_bound, grid_density)
    tt = np.linspace(t_lower, t_upper, grid_density)
    vals = d2w_duu(uu[:, None], tt[None, :])
    best = float(np.max(vals))
    if best <= 0:
        return 0.0
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    u0, t0 = uu[i], tt[j]
    # two coordinate-wise refinement sweeps
    for _ in range(2):
        u0, best = _refine_max_1d(lambda u: float(d2w_duu(u, t0)), -u_bound, u_bound, u0)
        t0, best = _refine_max_1d(lambda t: float(d2w_duu(u0, t)), t_lower, t_upper, t0)
    return max(best, 0.0)


def k_constant(w: LogPotential, grid_density: int = 512) -> float:
    """K = sqrt(sup over the strip of max(W''_uu, 0))."""
    if grid_density < 2:
        raise InvalidParameterError("grid_density must be >= 2")
    sup = _curvature_sup(w.d2w_duu, w.u_bound, w.t_lower, w.t_upper, grid_density)
    return math.sqrt(sup)


def to_log_form(pot: RadialPotential, grid_density: int = 512) -> LogPotential:
    """Substitute r = e^t: W(u, t) = V(u, e^t)."""
    t_upper = math.log(pot.r_outer)
    t_lower = math.log(pot.r_inner) if pot.r_inner else t_upper - 16.0

    def w(u, t):
        return pot.v(u, np.exp(np.asarray(t, float)))

    def dw_du(u, t):
        return pot.dv_du(u, np.exp(np.asarray(t, float)))

    def d2w_duu(u, t):
        return pot.d2v_duu(u, np.exp(np.asarray(t, float)))

    def dw_dt(u, t):
        et = np.exp(np.asarray(t, float))
        return pot.dv_dr(u, et) * et

    sup = _curvature_sup(d2w_duu, pot.u_bound, t_lower, t_upper, grid_density)
    return LogPotential(w=w, dw_du=dw_du, d2w_duu=d2w_duu, dw_dt=dw_dt,
                        u_bound=pot.u_bound, t_upper=t_upper, t_lower=t_lower,
                        k_curvature=math.sqrt(sup), radial=pot)


def example_446_potential(phi: BumpFunction, psi: BumpFunction,
                          variant: str = "chain-rule",
                          grid_density: int = 512) -> LogPotential:
    """Explicit family W built from two bumps so that du/dt = phi'(u) psi(t)
    solves the Newton equation u'' = -e^{2t} W'_u.

    variant "as-printed" carries psi in the quadratic term; "chain-rule"
    carries psi^2 (the version consistent with direct differentiation).
    """
    if variant not in ("as-printed", "chain-rule"):
        raise InvalidParameterError("unknown variant %r" % (variant,))

    def parts(u, t):
        u = np.asarray(u, float)
        t = np.asarray(t, float)
        return (phi.value(u), phi.derivative(u), phi.second_derivative(u),
                phi.third_derivative(u), psi.value(t), psi.derivative(t),
                psi.second_derivative(t), np.exp(-2.0 * t))

    if variant == "chain-rule":
        def w(u, t):
            F, F1, F2, F3, P, P1, P2, e2 = parts(u, t)
            return -e2 * (P1 * F + 0.5 * P * P * F1 * F1)

        def dw_du(u, t):
            F, F1, F2, F3, P, P1, P2, e2 = parts(u, t)
            return -e2 * (P1 * F1 + P * P * F1 * F2)

        def d2w_duu(u, t):
            F, F1, F2, F3, P, P1, P2, e2 = parts(u, t)
            return -e2 * (P1 * F2 + P * P * (F2 * F2 + F1 * F3))

        def dw_dt(u, t):
            F, F1, F2, F3, P, P1, P2, e2 = parts(u, t)
            return (2.0 * e2 * (P1 * F + 0.5 * P * P * F1 * F1)
                    - e2 * (P2 * F + P * P1 * F1 * F1))
    else:
        def w(u, t):
            F, F1, F2, F3, P, P1, P2, e2 = parts(u, t)
            return -e2 * (P1 * F + 0.5 * P * F1 * F1)

        def dw_du(u, t):
            F, F1, F2, F3, P, P1, P2, e2 = parts(u, t)
            return -e2 * (P1 * F1 + P * F1 * F2)

        def d2w_duu(u, t):
            F, F1, F2, F3, P, P1, P2, e2 = parts(u, t)
            return -e2 * (P1 * F2 + P * (F2 * F2 + F1 * F3))

        def dw_dt(u, t):
            F, F1, F2, F3, P, P1, P2, e2 = parts(u, t)
            return (2.0 * e2 * (P1 * F + 0.5 * P * F1 * F1)
                    - e2 * (P2 * F + 0.5 * P1 * F1 * F1))

    u_bound = abs(phi.center) + phi.width
    t_lower, t_upper = psi.support

    def v(u, r):
        return w(u, np.log(np.asarray(r, float)))

    def dv_du(u, r):
        return dw_du(u, np.log(np.asarray(r, float)))

    def d2v_duu(u, r):
        return d2w_duu(u, np.log(np.asarray(r, float)))

    def dv_dr(u, r):
        r = np.asarray(r, float)
        return dw_dt(u, np.log(r)) / r

    radial = RadialPotential(v=v, dv_du=dv_du, d2v_duu=d2v_duu, dv_dr=dv_dr,
                             u_bound=u_bound, r_outer=math.exp(t_upper),
                             r_inner=math.exp(t_lower))
    sup = _curvature_sup(d2w_duu, u_bound, t_lower, t_upper, grid_density)
    return LogPotential(w=w, dw_du=dw_du, d2w_duu=d2w_duu, dw_dt=dw_dt,
                        u_bound=u_bound, t_upper=t_upper, t_lower=t_lower,
                        k_curvature=math.sqrt(sup), radial=radial)


def rescale_log_potential(w: LogPotential, n_scale: int) -> LogPotential:
    """W_N(u, t) = W(N u, t) / N^2: the rescaled Hamiltonian family."""
    if n_scale < 1:
        raise InvalidParameterError("rescaling factor must be >= 1")
    N = float(n_scale)
    return LogPotential(
        w=lambda u, t: w.w(N * np.asarray(u, float), t) / (N * N),
        dw_du=lambda u, t: w.dw_du(N * np.asarray(u, float), t) / N,
        d2w_duu=lambda u, t: w.d2w_duu(N * np.asarray(u, float), t),
        dw_dt=lambda u, t: w.dw_dt(N * np.asarray(u, float), t) / (N * N),
        u_bound=w.u_bound / N, t_upper=w.t_upper, t_lower=w.t_lower,
        k_curvature=w.k_curvature, radial=None)


class RadialCurvatureEnvelope:
    """U(r) = max(0, sup_u V''_uu(u, r)): the bounding function of the
    minimality certificates, compactly supported in r."""

    def __init__(self, pot: RadialPotential, grid_density: int = 512):
        self.pot = pot
        self.r_outer = pot.r_outer
        self.r_inner = pot.r_inner
        self._u_grid = np.linspace(-pot.u_bound, pot.u_bound, grid_density)

    def _at(self, r: float) -> float:
        vals = self.pot.d2v_duu(self._u_grid, r)
        best = float(np.max(vals))
        if best <= 0:
            return 0.0
        u0 = float(self._u_grid[int(np.argmax(vals))])
        ub = self.pot.u_bound
        u0, best = _refine_max_1d(lambda u: float(self.pot.d2v_duu(u, r)), -ub, ub, u0)
        return max(best, 0.0)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if r.ndim == 0:
            return self._at(float(r))
        return np.array([self._at(float(x)) for x in r])


def u_bound_function(pot: RadialPotential, n: int,
                     grid_density: int = 512) -> RadialCurvatureEnvelope:
    """Curvature envelope U(r) for the dimension-n certificates (n >= 3)."""
    if n < 3:
        raise InvalidParameterError("certificates require n >= 3")
    return RadialCurvatureEnvelope(pot, grid_density=grid_density)

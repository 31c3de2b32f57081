"""Solution families pinned by inner/outer asymptotics and their ordering."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (InapplicableError, IntegrationFailureError,
                     InvalidParameterError, MinfolError, PartialFamilyError)
from .odeflow import IntegratorConfig, Trajectory, integrate_radial_ivp
from .potential import (BumpFunction, LogPotential, RadialPotential,
                        example_446_potential, to_log_form)

GRID_POINTS = 512


@dataclass
class OrderingReport:
    min_gap: float
    gaps: list[float]                  # min over the r-grid, per leaf pair
    min_dudalpha: float
    verdict: str                       # "ordered" | "not-ordered"
    degenerate_input: bool = False
    coverage: Optional[tuple[float, float]] = None  # u-range swept at r_mid


@dataclass
class LeafFamily:
    kind: str  # "N_A" | "M_A" | "example446"
    n: int
    A: float
    alpha_grid: np.ndarray
    r_grid: np.ndarray
    u_matrix: np.ndarray               # shape (len(r_grid), len(alpha_grid))
    trajectories: list[Trajectory] = field(default_factory=list)
    ordering: Optional[OrderingReport] = None


def check_ordering(fam: LeafFamily) -> OrderingReport:
    """Total-ordering evidence: min vertical gap between consecutive leaves
    over the common grid, plus finite-difference du/dalpha positivity."""
    if fam.u_matrix.shape[1] < 2:
        raise InvalidParameterError("ordering needs at least two leaves")
    alphas = np.asarray(fam.alpha_grid, float)
    degenerate = bool(np.any(np.diff(alphas) <= 0))
    diffs = np.diff(fam.u_matrix, axis=1)
    gaps = [float(np.min(diffs[:, j])) for j in range(diffs.shape[1])]
    min_gap = min(gaps)
    if degenerate:
        dud = 0.0
    else:
        dud = float(np.min(diffs / np.diff(alphas)[None, :]))
    mid = fam.u_matrix[len(fam.r_grid) // 2, :]
    report = OrderingReport(
        min_gap=min_gap, gaps=gaps, min_dudalpha=dud,
        verdict="ordered" if (min_gap > 0 and not degenerate) else "not-ordered",
        degenerate_input=degenerate,
        coverage=(float(mid[0]), float(mid[-1])))
    return report


def _family_on_grid(kind, n, A, alphas, trajectories, r_grid):
    u_matrix = np.column_stack([traj.u_of_r(r_grid) for traj in trajectories])
    fam = LeafFamily(kind=kind, n=n, A=A, alpha_grid=np.asarray(alphas, float),
                     r_grid=r_grid, u_matrix=u_matrix, trajectories=trajectories)
    if len(trajectories) >= 2:
        fam.ordering = check_ordering(fam)
    else:
        # a single leaf is trivially ordered
        mid = float(u_matrix[len(r_grid) // 2, 0])
        fam.ordering = OrderingReport(min_gap=math.inf, gaps=[],
                                      min_dudalpha=math.inf, verdict="ordered",
                                      coverage=(mid, mid))
    return fam


def build_NA_family(pot: RadialPotential, n: int, A: float, alphas,
                    cfg: IntegratorConfig = IntegratorConfig(),
                    r_min: float = 1e-4,
                    r_start: Optional[float] = None,
                    map_fn=map) -> LeafFamily:
    """Leaves with outer form u = alpha / r^{n-2} + A, integrated inward."""
    if n < 3:
        raise InvalidParameterError("outer-pinned family requires n >= 3")
    alphas = list(alphas)
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise InvalidParameterError("alpha grid must be strictly increasing")
    r_start = r_start if r_start else 2.0 * pot.r_outer
    w = to_log_form(pot)
    inward_cfg = IntegratorConfig(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                                  max_step=cfg.max_step,
                                  t_range=(math.log(r_start), math.log(r_min)),
                                  event_tol=cfg.event_tol)

    def leaf(alpha):
        u0 = alpha / r_start ** (n - 2) + A
        du0 = -(n - 2) * alpha / r_start ** (n - 1)
        return integrate_radial_ivp(pot, n, r_start, u0, du0, inward_cfg, w=w)

    trajectories, failed = [], []
    for alpha, res in zip(alphas, map_fn(_safe(leaf), alphas)):
        if isinstance(res, Exception):
            failed.append(alpha)
        else:
            trajectories.append(res)
    if failed:
        raise PartialFamilyError("leaves failed for alpha in %r" % (failed,),
                                 failed_alphas=failed)
    r_grid = np.geomspace(r_min, r_start, GRID_POINTS)
    return _family_on_grid("N_A", n, A, alphas, trajectories, r_grid)


def build_MA_family(pot: RadialPotential, n: int, A: float, alphas,
                    cfg: IntegratorConfig = IntegratorConfig(),
                    r_end: Optional[float] = None,
                    map_fn=map) -> LeafFamily:
    """Leaves with inner form u = A / r^{n-2} + alpha on (0, r_inner],
    integrated outward.  Requires a potential vanishing near the origin."""
    if n < 3:
        raise InvalidParameterError("inner-pinned family requires n >= 3")
    if not pot.r_inner or pot.r_inner <= 0:
        raise InapplicableError("potential has no inner support gap r_inner > 0")
    alphas = list(alphas)
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise InvalidParameterError("alpha grid must be strictly increasing")
    r0 = pot.r_inner
    r_end = r_end if r_end else 2.0 * pot.r_outer
    w = to_log_form(pot)
    out_cfg = IntegratorConfig(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                               max_step=cfg.max_step,
                               t_range=(math.log(r0), math.log(r_end)),
                               event_tol=cfg.event_tol)

    def leaf(alpha):
        u0 = A / r0 ** (n - 2) + alpha
        du0 = -(n - 2) * A / r0 ** (n - 1)
        return integrate_radial_ivp(pot, n, r0, u0, du0, out_cfg, w=w)

    trajectories, failed = [], []
    for alpha, res in zip(alphas, map_fn(_safe(leaf), alphas)):
        if isinstance(res, Exception):
            failed.append(alpha)
        else:
            trajectories.append(res)
    if failed:
        raise PartialFamilyError("leaves failed for alpha in %r" % (failed,),
                                 failed_alphas=failed)
    r_grid = np.geomspace(r0, r_end, GRID_POINTS)
    return _family_on_grid("M_A", n, A, alphas, trajectories, r_grid)


def _safe(fn):
    def wrapped(x):
        try:
            return fn(x)
        except IntegrationFailureError as exc:
            return exc
    return wrapped


@dataclass
class ExampleLeaf:
    u0: float
    t: np.ndarray
    u: np.ndarray
    max_residual: float


@dataclass
class ExampleReport:
    variant: str
    leaves: list[ExampleLeaf]
    max_residual: float
    min_pairwise_gap: float
    initial_gap: float
    crossings: int


def _first_order_flow(phi: BumpFunction, psi: BumpFunction, u0, t_span, cfg):
    def rhs(t, y):
        return (float(phi.derivative(y[0])) * float(psi.value(t)),)

    res = solve_ivp(rhs, t_span, (u0,), method="DOP853", dense_output=True,
                    rtol=cfg.rel_tol, atol=cfg.abs_tol)
    if not res.success:
        raise IntegrationFailureError("first-order flow failed: %s" % res.message)
    return res.sol


def example_446_check(phi: BumpFunction, psi: BumpFunction, u0_grid,
                      cfg: Optional[IntegratorConfig] = None,
                      variant: str = "chain-rule",
                      fd_step: float = 2e-4) -> ExampleReport:
    """Integrate du/dt = phi'(u) psi(t) per initial value and verify the Newton
    residual u'' + e^{2t} W'_u(u, t) along each graph (u'' by a fourth-order
    stencil on the dense flow field), plus pairwise non-crossing."""
    if cfg is None:
        cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13)
    w = example_446_potential(phi, psi, variant=variant)
    t_lo, t_hi = psi.support
    t_span = (t_lo - 0.5, t_hi + 0.5)
    u0_grid = sorted(float(x) for x in u0_grid)

    ts = np.linspace(t_span[0] + 2 * fd_step, t_span[1] - 2 * fd_step, 801)
    leaves = []
    curves = []
    for u0 in u0_grid:
        sol = _first_order_flow(phi, psi, u0, t_span, cfg)

        def udot(t):
            uu = sol(np.asarray(t))[0]
            return phi.derivative(uu) * psi.value(np.asarray(t))

        h = fd_step
        uddot = (-udot(ts + 2 * h) + 8 * udot(ts + h) - 8 * udot(ts - h)
                 + udot(ts - 2 * h)) / (12.0 * h)
        us = sol(ts)[0]
        residual = uddot + np.exp(2.0 * ts) * w.dw_du(us, ts)
        leaves.append(ExampleLeaf(u0=u0, t=ts, u=us,
                                  max_residual=float(np.max(np.abs(residual)))))
        curves.append(us)

    max_res = max(leaf.max_residual for leaf in leaves) if leaves else 0.0
    if len(curves) >= 2:
        mat = np.column_stack(curves)
        diffs = np.diff(mat, axis=1)
        min_gap = float(np.min(diffs))
        crossings = int(np.count_nonzero(np.min(diffs, axis=0) <= 0))
        initial_gap = float(np.min(np.diff(np.asarray(u0_grid))))
    else:
        min_gap, crossings, initial_gap = math.inf, 0, math.inf
    return ExampleReport(variant=variant, leaves=leaves, max_residual=max_res,
                         min_pairwise_gap=min_gap, initial_gap=initial_gap,
                         crossings=crossings)


def select_example_446_variant(phi: BumpFunction, psi: BumpFunction,
                               cfg: IntegratorConfig = IntegratorConfig()) -> str:
    """Residual oracle: pick the variant whose Newton residual along the
    first-order flow is smaller."""
    lo, hi = phi.support
    probes = np.linspace(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), 5)
    res = {}
    for variant in ("as-printed", "chain-rule"):
        rep = example_446_check(phi, psi, probes, cfg=cfg, variant=variant)
        res[variant] = rep.max_residual
    return min(res, key=res.get)


def decaying_jacobi_inward(traj: Trajectory, n: int,
                           cfg: Optional[IntegratorConfig] = None):
    """Jacobi field matching the decaying free mode 1/r^{n-2} outside the
    support, integrated inward along the leaf; realizes xi(inf) = 0."""
    from .jacobi import integrate_jacobi

    cfg = cfg or traj.cfg
    t_hi = traj.t_max
    # xi = e^{-(n-2) t}, dxi/dt = -(n-2) e^{-(n-2) t} at the outer end
    xi0 = math.exp(-(n - 2) * t_hi)
    dxi0 = -(n - 2) * xi0
    return integrate_jacobi(traj, xi0, dxi0, mode="radial-form", cfg=cfg,
                            t_init=traj.t_min, t_end=t_hi)

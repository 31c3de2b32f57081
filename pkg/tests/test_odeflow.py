import math

import numpy as np
import pytest

from minfol.errors import InvalidParameterError
from minfol.odeflow import (IntegratorConfig, PhaseState,
                            asymptotic_match_outer, flow_volume_check,
                            hamiltonian_value, integrate_hamiltonian,
                            integrate_radial_ivp)

TIGHT = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13)


def _free_radial(n, alpha, A, r_lo=0.01, r_hi=100.0):
    from minfol.catalog import flat

    pot = flat()
    r0 = 1.0
    if n == 2:
        u0, du0 = A + alpha * math.log(r0), alpha / r0
    else:
        u0 = alpha / r0 ** (n - 2) + A
        du0 = -(n - 2) * alpha / r0 ** (n - 1)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                           t_range=(math.log(r0), math.log(r_hi)))
    out = integrate_radial_ivp(pot, n, r0, u0, du0, cfg)
    cfg_in = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                              t_range=(math.log(r0), math.log(r_lo)))
    inward = integrate_radial_ivp(pot, n, r0, u0, du0, cfg_in)
    return out, inward


@pytest.mark.parametrize("n,alpha,A", [(3, 0.7, -0.2), (4, -1.1, 0.4)])
def test_free_field_power_law(n, alpha, A):
    out, inward = _free_radial(n, alpha, A)
    for traj in (out, inward):
        rr = np.geomspace(math.exp(traj.t_min), math.exp(traj.t_max), 200)
        exact = alpha / rr ** (n - 2) + A
        got = traj.u_of_r(rr)
        assert np.max(np.abs(got - exact) / (1.0 + np.abs(exact))) < 1e-9


def test_free_field_logarithmic_n2():
    out, inward = _free_radial(2, 0.5, 0.3)
    for traj in (out, inward):
        rr = np.geomspace(math.exp(traj.t_min), math.exp(traj.t_max), 200)
        exact = 0.3 + 0.5 * np.log(rr)
        got = traj.u_of_r(rr)
        assert np.max(np.abs(got - exact) / (1.0 + np.abs(exact))) < 1e-9


def test_hamiltonian_free_motion_is_linear(flat_log):
    s0 = PhaseState(u=-2.0, p=0.3, t=-1.0)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13, t_range=(-1.0, 4.0))
    traj = integrate_hamiltonian(flat_log, s0, cfg)
    for t in np.linspace(-1.0, 4.0, 30):
        u, p = traj.state(float(t))
        assert u == pytest.approx(-2.0 + 0.3 * (t + 1.0), abs=1e-12)
        assert p == pytest.approx(0.3, abs=1e-12)


def test_support_events_detected(weak_log):
    s0 = PhaseState(u=-3.0, p=1.0, t=-2.0)
    cfg = IntegratorConfig(t_range=(-2.0, 4.0))
    traj = integrate_hamiltonian(weak_log, s0, cfg)
    kinds = [ev.kind for ev in traj.events]
    assert "enter" in kinds and "exit" in kinds
    entry = traj.first_entry()
    u, _ = traj.state(entry)
    # at entry the state sits on the strip boundary
    assert (abs(abs(u) - weak_log.u_bound) < 1e-6
            or abs(entry - weak_log.t_upper) < 1e-6
            or abs(entry - weak_log.t_lower) < 1e-6)


def test_reversibility(strong_log):
    s0 = PhaseState(u=0.1, p=-0.2, t=-1.0)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13, t_range=(-1.0, 3.0))
    fwd = integrate_hamiltonian(strong_log, s0, cfg)
    u1, p1 = fwd.state(3.0)
    back_cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                                t_range=(3.0, -1.0))
    back = integrate_hamiltonian(strong_log, PhaseState(u=u1, p=p1, t=3.0),
                                 back_cfg)
    u0, p0 = back.state(-1.0)
    assert u0 == pytest.approx(0.1, abs=1e-8)
    assert p0 == pytest.approx(-0.2, abs=1e-8)


def test_self_convergence(strong_log):
    s0 = PhaseState(u=0.0, p=0.1, t=-1.0)
    coarse = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-8, t_range=(-1.0, 2.0))
    fine = coarse.halved()
    tc = integrate_hamiltonian(strong_log, s0, coarse)
    tf = integrate_hamiltonian(strong_log, s0, fine)
    uc, _ = tc.state(2.0)
    uf, _ = tf.state(2.0)
    assert uc == pytest.approx(uf, abs=1e-7)


def test_hamiltonian_value_free(flat_log):
    s = PhaseState(u=0.0, p=0.4, t=0.0)
    assert hamiltonian_value(flat_log, s) == pytest.approx(0.08)


def test_asymptotic_match_roundtrip(weak_pot):
    n, alpha, A = 3, 0.8, -0.1
    r0 = 2.0 * weak_pot.r_outer
    u0 = alpha / r0 + A
    du0 = -alpha / r0 ** 2
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                           t_range=(math.log(r0), math.log(1.5 * r0)))
    traj = integrate_radial_ivp(weak_pot, n, r0, u0, du0, cfg)
    fit = asymptotic_match_outer(traj, n)
    assert fit.alpha == pytest.approx(alpha, abs=1e-6)
    assert fit.A == pytest.approx(A, abs=1e-6)
    assert fit.max_residual < 1e-6


@pytest.mark.parametrize("state", [PhaseState(u=0.0, p=0.1, t=-2.0),
                                   PhaseState(u=-3.0, p=0.8, t=-4.0)])
def test_liouville_volume(strong_log, state):
    det = flow_volume_check(strong_log, state,
                            IntegratorConfig(t_range=(state.t, state.t + 8.0)))
    assert abs(det - 1.0) < 1e-6


def test_invalid_state_rejected():
    with pytest.raises(InvalidParameterError):
        PhaseState(u=float("nan"), p=0.0, t=0.0)


def test_straight_line_outside_strip(weak_log):
    # above the strip with outward momentum past the support: free forever
    t0 = weak_log.t_upper + 0.1
    s0 = PhaseState(u=2.0 * weak_log.u_bound, p=0.5, t=t0)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                           t_range=(t0, t0 + 20.0))
    traj = integrate_hamiltonian(weak_log, s0, cfg)
    for t in np.linspace(t0, t0 + 20.0, 15):
        u, p = traj.state(float(t))
        assert u == pytest.approx(2.0 + 0.5 * (t - t0), abs=1e-10)
        assert p == pytest.approx(0.5, abs=1e-10)


def test_dh_dt_matches_explicit_time_derivative(scaling_log):
    w = scaling_log
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                           t_range=(-1.0, w.t_upper))
    traj = integrate_hamiltonian(w, PhaseState(u=0.1, p=0.05, t=-1.0), cfg)
    h = 1e-5
    for t in np.linspace(-0.5, w.t_upper - 0.1, 10):
        hs = []
        for tt in (t - h, t + h):
            u, p = traj.state(float(tt))
            hs.append(hamiltonian_value(w, PhaseState(u=u, p=p, t=float(tt))))
        dh_dt = (hs[1] - hs[0]) / (2 * h)
        u, _ = traj.state(float(t))
        explicit = math.exp(2.0 * t) * (2.0 * float(w.w(u, t))
                                        + float(w.dw_dt(u, t)))
        assert dh_dt == pytest.approx(explicit, abs=1e-6)


def test_liouville_for_rescaled_hamiltonian(scaling_log):
    from minfol.potential import rescale_log_potential

    wn = rescale_log_potential(scaling_log, 4)
    det = flow_volume_check(wn, PhaseState(u=0.05, p=0.1, t=-5.0),
                            IntegratorConfig(t_range=(-5.0, 5.0)))
    assert abs(det - 1.0) <= 1e-6

import math

import numpy as np
import pytest

from minfol.errors import InvalidParameterError
from minfol.odeflow import IntegratorConfig, PhaseState, integrate_hamiltonian
from minfol.rigidity import (conjugate_point_scan,
                             discriminant_inequality_check, gibbs_density,
                             rescaled_inequality_sides, scaling_exponent_fit,
                             verify_finding)

GRID = np.linspace(-0.4, 0.4, 4)


def _simpson_sides(w, N, num=801):
    """Independent fixed-grid Simpson oracle for the two rescaled integrals."""
    from scipy.integrate import simpson

    U, t_lo, t_hi = w.u_bound, w.t_lower, w.t_upper
    vv = np.linspace(-U, U, num)
    tt = np.linspace(t_lo, t_hi, num)
    V, T = np.meshgrid(vv, tt, indexing="ij")
    e2 = np.exp(2.0 * T)
    weight = np.exp(-w.w(V, T) * e2 / N ** 2)
    lhs_vals = weight * (e2 * w.dw_du(V, T)) ** 2
    rhs_vals = weight * (e2 * (2.0 * w.w(V, T) + w.dw_dt(V, T))) ** 2
    lhs = simpson(simpson(lhs_vals, x=tt, axis=1), x=vv)
    rhs = simpson(simpson(rhs_vals, x=tt, axis=1), x=vv)
    return 4.0 / N ** 3 * lhs, 1.0 / N ** 5 * rhs


class TestScan:
    def test_strong_bump_has_conjugate_points(self, strong_log):
        rep = conjugate_point_scan(strong_log, GRID, GRID, -2.0,
                                   strong_log.t_upper + 10.0)
        assert len(rep.findings) >= 1
        assert not rep.failures
        for f in rep.findings:
            assert f.t1 < f.t2
            assert verify_finding(strong_log, f) < 1e-6

    def test_flat_has_none(self, flat_log):
        rep = conjugate_point_scan(flat_log, GRID, GRID, -1.0, 5.0)
        assert rep.findings == []

    def test_nonpositive_curvature_has_none(self):
        # W''_uu <= 0 comparison case: no oscillation can occur
        from minfol.potential import LogPotential, make_bump

        f = make_bump(0.0, 1.0, 1.0)
        g = make_bump(1.0, 0.5, 1.0)
        w = LogPotential(
            w=lambda u, t: np.zeros_like(np.asarray(u) * np.asarray(t)),
            dw_du=lambda u, t: np.zeros_like(np.asarray(u) * np.asarray(t)),
            d2w_duu=lambda u, t: -f.value(u) * g.value(t),
            dw_dt=lambda u, t: np.zeros_like(np.asarray(u) * np.asarray(t)),
            u_bound=1.0, t_upper=1.5, t_lower=0.5, k_curvature=0.0)
        rep = conjugate_point_scan(w, GRID, GRID, -1.0, 5.0)
        assert rep.findings == []

    def test_bad_grid_rejected(self, flat_log):
        with pytest.raises(InvalidParameterError):
            conjugate_point_scan(flat_log, [], GRID, -1.0, 5.0)
        with pytest.raises(InvalidParameterError):
            conjugate_point_scan(flat_log, GRID, GRID, 5.0, -1.0)


class TestGibbs:
    def test_density_evolves_by_minus_dh_dt(self, scaling_log):
        w = scaling_log
        cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                               t_range=(-1.0, w.t_upper + 1.0))
        traj = integrate_hamiltonian(w, PhaseState(u=0.05, p=0.1, t=-1.0), cfg)
        h = 1e-5
        for t in np.linspace(-0.5, w.t_upper, 12):
            states = []
            for tt in (t - h, t, t + h):
                u, p = traj.state(float(tt))
                states.append(PhaseState(u=u, p=p, t=float(tt)))
            lhs = (math.log(gibbs_density(w, states[2]))
                   - math.log(gibbs_density(w, states[0]))) / (2 * h)
            u, _ = traj.state(float(t))
            e2 = math.exp(2.0 * t)
            rhs = -e2 * (2.0 * float(w.w(u, t)) + float(w.dw_dt(u, t)))
            assert lhs == pytest.approx(rhs, abs=1e-6)


class TestScaling:
    def test_matches_simpson_oracle_at_n1(self, scaling_log):
        lhs, rhs = rescaled_inequality_sides(scaling_log, 1)
        olhs, orhs = _simpson_sides(scaling_log, 1)
        assert lhs == pytest.approx(olhs, rel=1e-6)
        assert rhs == pytest.approx(orhs, rel=1e-6)

    def test_slopes_and_crossover(self, scaling_log):
        fit = scaling_exponent_fit(scaling_log, [4, 8, 16, 32])
        assert abs(fit.slope_lhs + 3.0) < 0.15
        assert abs(fit.slope_rhs + 5.0) < 0.15
        assert fit.crossover_N is not None
        l, r = rescaled_inequality_sides(scaling_log, fit.crossover_N)
        assert l > r

    def test_zero_potential_is_identically_zero(self, flat_log):
        fit = scaling_exponent_fit(flat_log, [4, 8, 16])
        assert fit.identically_zero
        assert fit.crossover_N is None

    def test_discriminant_holds_at_n1(self, scaling_log):
        lhs, rhs, holds = discriminant_inequality_check(scaling_log)
        assert holds
        assert lhs == pytest.approx(
            math.sqrt(2 * math.pi)
            * rescaled_inequality_sides(scaling_log, 1)[0], rel=1e-12)

    def test_invalid_inputs(self, scaling_log):
        with pytest.raises(InvalidParameterError):
            rescaled_inequality_sides(scaling_log, 0)
        with pytest.raises(InvalidParameterError):
            scaling_exponent_fit(scaling_log, [4, 8])
        with pytest.raises(InvalidParameterError):
            scaling_exponent_fit(scaling_log, [4, 8, 8])


class TestRigidityConsistency:
    def test_conjugate_points_imply_broken_discriminant(self):
        # a potential with a steep u-profile: the inequality already fails
        # at N = 1, and the scan finds conjugate points on the same potential
        from minfol.catalog import narrow_bump
        from minfol.potential import to_log_form

        w = to_log_form(narrow_bump())
        lhs, rhs, holds = discriminant_inequality_check(w)
        assert not holds and lhs > rhs
        rep = conjugate_point_scan(w, np.linspace(-0.2, 0.2, 3),
                                   np.linspace(-0.2, 0.2, 3), -2.0,
                                   w.t_upper + 10.0)
        assert len(rep.findings) >= 1

"""Acceptance gate: ten end-to-end criteria, each printing one PASS/FAIL line
and enforcing its runtime budget."""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.integrate import simpson, solve_ivp

from minfol.catalog import (certified_bump, example_pair, flat, scaling_bump,
                            strong_bump, weak_bump)
from minfol.certify import (SupportedFunction, check_condition_A,
                            hardy_identity_check, second_variation)
from minfol.foliation import (build_MA_family, build_NA_family,
                              example_446_check, select_example_446_variant)
from minfol.jacobi import (integrate_jacobi, is_disconjugate,
                           nonvanishing_field, riccati_blowup_window,
                           riccati_bounds_check, riccati_from_jacobi)
from minfol.odeflow import (IntegratorConfig, PhaseState, flow_volume_check,
                            integrate_hamiltonian, integrate_radial_ivp)
from minfol.potential import make_bump, scale_potential, to_log_form
from minfol.rigidity import (conjugate_point_scan, rescaled_inequality_sides,
                             scaling_exponent_fit, verify_finding)

TIGHT = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13)


@contextmanager
def criterion(num, name, limit_seconds):
    start = time.time()
    try:
        yield
    except BaseException:
        print("criterion %2d (%s): FAIL after %.1fs" %
              (num, name, time.time() - start))
        raise
    elapsed = time.time() - start
    verdict = "PASS" if elapsed < limit_seconds else "FAIL (over budget)"
    print("criterion %2d (%s): %s in %.1fs (budget %ds)" %
          (num, name, verdict, elapsed, limit_seconds))
    assert elapsed < limit_seconds


def _simpson_energy(n, num=200001):
    """Independent quadrature oracle for the xi = 1 - r closed forms."""
    rr = np.linspace(1e-12, 1.0, num)
    c = ((n - 2) / 2.0) ** 2
    vals = rr ** (n - 1) - c * rr ** (n - 3) * (1.0 - rr) ** 2
    return simpson(vals, x=rr)


def test_criterion_01_hardy_identity():
    with criterion(1, "hardy-identity", 10):
        # closed forms through the independent fixed-grid oracle
        assert _simpson_energy(3) == pytest.approx(0.25, rel=1e-8)
        assert _simpson_energy(4) == pytest.approx(1.0 / 6.0, rel=1e-8)
        lhs3, _ = hardy_identity_check(lambda r: 1.0 - r, 3, 0.0, 1.0,
                                       dxi=lambda r: -1.0)
        lhs4, _ = hardy_identity_check(lambda r: 1.0 - r, 4, 0.0, 1.0,
                                       dxi=lambda r: -1.0)
        assert lhs3 == pytest.approx(0.25, rel=1e-8)
        assert lhs4 == pytest.approx(1.0 / 6.0, rel=1e-8)
        # 20 random smooth test functions per dimension
        rng = np.random.default_rng(0)
        for n in (3, 4, 5):
            for _ in range(20):
                width = rng.uniform(0.2, 1.2)
                center = rng.uniform(0.2 + width, 5.0 - width)
                xi = make_bump(center, width, rng.uniform(-2.0, 2.0))
                lhs, rhs = hardy_identity_check(xi, n, 0.1, 5.5)
                assert lhs >= -1e-10
                assert abs(lhs - rhs) <= 1e-8 * max(abs(lhs), abs(rhs))


def test_criterion_02_free_field_exactness():
    with criterion(2, "free-field-exactness", 5):
        pot = flat()
        for n, alpha, A in ((3, 0.7, -0.2), (4, -1.1, 0.4)):
            r0 = 1.0
            u0 = alpha / r0 ** (n - 2) + A
            du0 = -(n - 2) * alpha / r0 ** (n - 1)
            for r_far in (100.0, 0.01):
                cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                                       t_range=(0.0, math.log(r_far)))
                traj = integrate_radial_ivp(pot, n, r0, u0, du0, cfg)
                rr = np.geomspace(min(r0, r_far), max(r0, r_far), 300)
                exact = alpha / rr ** (n - 2) + A
                err = np.abs(traj.u_of_r(rr) - exact) / (1.0 + np.abs(exact))
                assert np.max(err) < 1e-9
        a, b = 0.3, 0.5
        for r_far in (100.0, 0.01):
            cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13,
                                   t_range=(0.0, math.log(r_far)))
            traj = integrate_radial_ivp(pot, 2, 1.0, a, b, cfg)
            rr = np.geomspace(min(1.0, r_far), max(1.0, r_far), 300)
            exact = a + b * np.log(rr)
            err = np.abs(traj.u_of_r(rr) - exact) / (1.0 + np.abs(exact))
            assert np.max(err) < 1e-9


def test_criterion_03_certified_potential_consistency():
    with criterion(3, "certificate-consistency", 60):
        n = 3
        pot = certified_bump(n=n, safety=0.9)
        assert check_condition_A(pot, n).verdict == "certified"
        # 100 sampled radial solutions: no conjugate points anywhere
        r0, r1 = 0.5, 8.0
        cfg = IntegratorConfig(t_range=(math.log(r0), math.log(r1)))

        def probe(args):
            u0, du0 = args
            traj = integrate_radial_ivp(pot, n, r0, u0, du0, cfg)
            fld = integrate_jacobi(traj, 0.0, 1.0, mode="radial-form",
                                   cfg=cfg, t_init=traj.t_min)
            return [z for z in fld.zeros if z > traj.t_min + 1e-9], traj

        grid = [(u0, du0)
                for u0 in np.linspace(-0.5, 0.5, 10)
                for du0 in np.linspace(-0.3, 0.3, 10)]
        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(probe, grid))
        assert all(zeros == [] for zeros, _ in results)
        # positive second variation for 50 random test functions
        center_traj = results[len(results) // 2][1]
        rng = np.random.default_rng(42)
        for _ in range(50):
            width = rng.uniform(0.3, 1.5)
            center = rng.uniform(r0 + width + 0.05, r1 - width - 0.05)
            xi = make_bump(center, width, rng.uniform(0.2, 2.0))
            assert second_variation(center_traj, xi, pot, n) > 0
        # the same potential scaled x10 fails the pointwise certificate
        assert check_condition_A(scale_potential(pot, 10.0),
                                 n).verdict == "not-certified"


def test_criterion_04_conjugate_point_witness():
    with criterion(4, "conjugate-point-witness", 300):
        w = to_log_form(strong_bump())
        grid = np.linspace(-0.5, 0.5, 11)
        with ThreadPoolExecutor(max_workers=4) as pool:
            rep = conjugate_point_scan(w, grid, grid, -2.0, w.t_upper + 10.0,
                                       map_fn=pool.map)
        assert len(rep.findings) >= 1
        for f in rep.findings:
            assert verify_finding(w, f) < 1e-6


def test_criterion_05_scaling_law():
    with criterion(5, "scaling-law", 120):
        w = to_log_form(scaling_bump())
        fit = scaling_exponent_fit(w, [4, 8, 16, 32])
        assert abs(fit.slope_lhs + 3.0) <= 0.15
        assert abs(fit.slope_rhs + 5.0) <= 0.15
        l64 = rescaled_inequality_sides(w, 64)
        l128 = rescaled_inequality_sides(w, 128)
        rel_lhs = abs(128 ** 3 * l128[0] - 64 ** 3 * l64[0]) / (128 ** 3 * l128[0])
        rel_rhs = abs(128 ** 5 * l128[1] - 64 ** 5 * l64[1]) / (128 ** 5 * l128[1])
        assert rel_lhs < 1e-3 and rel_rhs < 1e-3
        assert fit.crossover_N is not None
        lhs_c, rhs_c = rescaled_inequality_sides(w, fit.crossover_N)
        assert lhs_c > rhs_c


def test_criterion_06_riccati_blowup_window():
    with criterion(6, "riccati-blowup-window", 5):
        # the worked example
        lo, hi = riccati_blowup_window(-2.0, 1.0, 0.0)
        assert (lo, hi) == (0.0, pytest.approx(0.5 * math.log(3.0)))
        rng = np.random.default_rng(7)
        for _ in range(50):
            B = rng.uniform(0.1, 4.0)
            omega0 = -(B + rng.uniform(0.05, 5.0))
            _, t_star = riccati_blowup_window(omega0, B, 0.0)

            def rhs(t, y):
                return (B * B - y[0] * y[0],)

            def blown(t, y):
                return abs(y[0]) - 1e8
            blown.terminal = True
            blown.direction = 1
            res = solve_ivp(rhs, (0.0, t_star + 1.0), (omega0,),
                            method="DOP853", rtol=1e-12, atol=1e-12,
                            events=blown)
            t_numeric = float(res.t_events[0][0]) + 1e-8
            assert abs(t_numeric - t_star) < 1e-6


def test_criterion_07_riccati_bounds():
    with criterion(7, "riccati-bounds", 60):
        # draw conjugate-point-free trajectories from a flat and a weak-bump
        # potential (the bounds apply to disconjugate solutions only, so the
        # candidate pool is filtered through the whole-line test)
        pools = [(flat(), np.linspace(-0.4, 0.4, 5)),
                 (weak_bump(), np.linspace(-0.4, 0.4, 7))]
        count = 0
        for pot, grid in pools:
            w = to_log_form(pot)
            cap = w.k_curvature * math.exp(w.t_upper)
            taken = 0
            for u0 in grid:
                for p0 in grid:
                    if taken == 25:
                        break
                    cfg = IntegratorConfig(t_range=(-2.0, w.t_upper + 6.0))
                    traj = integrate_hamiltonian(
                        w, PhaseState(u=float(u0), p=float(p0), t=-2.0), cfg)
                    if not is_disconjugate(traj, cfg):
                        continue
                    fld = nonvanishing_field(traj, cfg)
                    assert fld.zeros == []
                    trace = riccati_from_jacobi(fld)
                    rep = riccati_bounds_check(trace, w)
                    assert np.all(np.abs(trace.omega) <= cap + 1e-9)
                    assert rep.tail_ok and rep.region_ok and rep.all_ok
                    taken += 1
            count += taken
        assert count == 50


def test_criterion_08_liouville_preservation():
    with criterion(8, "liouville-preservation", 30):
        states = [PhaseState(u=0.0, p=0.1, t=-10.0),
                  PhaseState(u=-2.0, p=0.6, t=-10.0)]
        for pot in (flat(), weak_bump(), strong_bump(), scaling_bump()):
            w = to_log_form(pot)
            for s in states:
                det = flow_volume_check(
                    w, s, IntegratorConfig(t_range=(-10.0, 10.0)))
                assert abs(det - 1.0) <= 1e-6


def test_criterion_09_explicit_family_residuals():
    with criterion(9, "explicit-family-residuals", 30):
        phi, psi = example_pair()
        variant = select_example_446_variant(phi, psi)
        rejected = ("as-printed" if variant == "chain-rule"
                    else "chain-rule")
        u0s = np.linspace(-0.8, 0.8, 11)
        rep = example_446_check(phi, psi, u0s, variant=variant)
        assert len(rep.leaves) == 11
        assert rep.max_residual <= 1e-7
        assert rep.crossings == 0 and rep.min_pairwise_gap > 0
        bad = example_446_check(phi, psi, u0s, variant=rejected)
        assert bad.max_residual > 1e-3


def test_criterion_10_foliation_ordering():
    with criterion(10, "foliation-ordering", 60):
        pot = certified_bump(n=3, safety=0.9)
        alphas = np.linspace(-0.5, 0.5, 9)
        for fam in (build_NA_family(pot, 3, 0.0, alphas),
                    build_MA_family(pot, 3, 0.0, alphas)):
            rep = fam.ordering
            assert rep.verdict == "ordered"
            assert rep.min_gap > 0
            assert rep.min_dudalpha > 0

"""Config-driven command-line front end.

Exit codes: 0 = pass / certified / found-as-expected,
1 = not-certified / not-found, 2 = error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext

import numpy as np

from . import __version__
from .certify import check_condition_A, check_condition_B, hardy_identity_check
from .config import ExperimentConfig, build_bumps, build_potential, load_config
from .errors import ConfigError, MinfolError
from .foliation import (build_MA_family, build_NA_family, example_446_check,
                        select_example_446_variant)
from .odeflow import (IntegratorConfig, asymptotic_match_outer,
                      integrate_radial_ivp)
from .potential import make_bump, to_log_form
from .reporting import (write_family_csv, write_csv, write_findings_csv,
                        write_report, write_trajectory_csv)
from .rigidity import (conjugate_point_scan, discriminant_inequality_check,
                       rescaled_inequality_sides, scaling_exponent_fit,
                       verify_finding)

SLOPE_TOL = 0.15
RESIDUAL_TOL = 1e-7


def _grid(spec) -> np.ndarray:
    """[lo, hi, count] -> linspace; an explicit list is used as-is."""
    spec = list(spec)
    if len(spec) == 3 and isinstance(spec[2], int) and spec[2] > 1:
        return np.linspace(float(spec[0]), float(spec[1]), spec[2])
    return np.asarray([float(x) for x in spec])


def _pool(jobs: int):
    if jobs > 1:
        return ThreadPoolExecutor(max_workers=jobs)
    return nullcontext()


def _map_fn(pool):
    return pool.map if hasattr(pool, "map") else map


def _run_certify(cfg: ExperimentConfig, out_dir: str):
    pot = build_potential(cfg)
    if pot is None:
        raise ConfigError("certify requires a radial potential "
                          "(kind zero or product)")
    cert_a = check_condition_A(pot, cfg.n, x0_offset=cfg.params["x0_offset"],
                               grid_points=int(cfg.params["grid_points"]))
    cert_b = check_condition_B(pot, cfg.n)
    certified = "certified" in (cert_a.verdict, cert_b.verdict)
    results = {"condition_A": cert_a.to_dict(), "condition_B": cert_b.to_dict()}
    verdict = "certified" if certified else "not-certified"
    return (0 if certified else 1), results, verdict, {}


def _run_solve(cfg: ExperimentConfig, out_dir: str):
    pot = build_potential(cfg)
    if pot is None:
        raise ConfigError("solve requires a radial potential")
    p = cfg.params
    r0 = float(p["r0"]) if p["r0"] else 2.0 * pot.r_outer
    r_end = float(p["r_end"]) if p["r_end"] else 1e-2
    run_cfg = IntegratorConfig(rel_tol=cfg.integrator.rel_tol,
                               abs_tol=cfg.integrator.abs_tol,
                               max_step=cfg.integrator.max_step,
                               t_range=(math.log(r0), math.log(r_end)),
                               event_tol=cfg.integrator.event_tol)
    traj = integrate_radial_ivp(pot, cfg.n, r0, float(p["u0"]), float(p["du0"]),
                                run_cfg)
    write_trajectory_csv(traj, os.path.join(out_dir, "trajectory.csv"),
                         samples=int(p["samples"]))
    u_end, p_end = traj.state(traj.t_min if r_end < r0 else traj.t_max)
    results = {"r0": r0, "r_end": r_end,
               "final_state": {"u": u_end, "p": p_end},
               "events": [{"t": ev.t, "kind": ev.kind} for ev in traj.events]}
    if cfg.n >= 3:
        fit = asymptotic_match_outer(traj, cfg.n)
        results["outer_fit"] = {"alpha": fit.alpha, "A": fit.A,
                                "max_residual": fit.max_residual}
    return 0, results, "solved", {"trajectory.csv": True}


def _run_scan(cfg: ExperimentConfig, out_dir: str):
    pot = build_potential(cfg)
    w = to_log_form(pot)
    p = cfg.params
    t_end = float(p["t_end"]) if p["t_end"] is not None else w.t_upper + 10.0
    with _pool(cfg.jobs) as pool:
        report = conjugate_point_scan(w, _grid(p["u0"]), _grid(p["p0"]),
                                      float(p["t_start"]), t_end,
                                      cfg=cfg.integrator,
                                      n_slide=int(p["n_slide"]),
                                      map_fn=_map_fn(pool))
    findings = sorted(report.findings, key=lambda f: (f.t_start, f.u0, f.p0))
    write_findings_csv(findings, os.path.join(out_dir, "findings.csv"))
    verifications = [verify_finding(w, f, cfg.integrator, t_end=t_end)
                     for f in findings]
    results = {
        "num_cells": len(report.u0_grid) * len(report.p0_grid)
        * len(report.t_starts),
        "num_findings": len(findings),
        "num_failures": len(report.failures),
        "findings": [{"u0": f.u0, "p0": f.p0, "t1": f.t1, "t2": f.t2,
                      "verification_residual": v}
                     for f, v in zip(findings, verifications)],
    }
    found = len(findings) > 0
    return (0 if found else 1), results, \
        ("conjugate-points-found" if found else "no-conjugate-points"), {}


def _run_foliate(cfg: ExperimentConfig, out_dir: str):
    pot = build_potential(cfg)
    p = cfg.params
    alphas = [float(a) for a in _grid(p["alphas"])]
    with _pool(cfg.jobs) as pool:
        if p["family"] == "N_A":
            fam = build_NA_family(pot, cfg.n, float(p["A"]), alphas,
                                  cfg=cfg.integrator,
                                  r_min=float(p["r_min"]),
                                  r_start=float(p["r_start"]) if p["r_start"]
                                  else None,
                                  map_fn=_map_fn(pool))
        else:
            fam = build_MA_family(pot, cfg.n, float(p["A"]), alphas,
                                  cfg=cfg.integrator,
                                  r_end=float(p["r_end"]) if p["r_end"]
                                  else None,
                                  map_fn=_map_fn(pool))
    write_family_csv(fam, os.path.join(out_dir, "family.csv"))
    ordering = fam.ordering
    results = {"family": p["family"], "A": float(p["A"]), "alphas": alphas,
               "min_gap": ordering.min_gap,
               "min_dudalpha": ordering.min_dudalpha,
               "coverage": list(ordering.coverage)}
    ordered = ordering.verdict == "ordered"
    return (0 if ordered else 1), results, ordering.verdict, {}


def _run_scaling(cfg: ExperimentConfig, out_dir: str):
    pot = build_potential(cfg)
    w = to_log_form(pot)
    p = cfg.params
    quad_tol = float(p["quad_tol"])
    fit = scaling_exponent_fit(w, [int(N) for N in p["N_list"]],
                               quad_tol=quad_tol)
    rows = list(zip(fit.N_list, fit.lhs, fit.rhs))
    results = {"N_list": fit.N_list, "lhs": fit.lhs, "rhs": fit.rhs,
               "slope_lhs": fit.slope_lhs, "slope_rhs": fit.slope_rhs,
               "crossover_N": fit.crossover_N,
               "identically_zero": fit.identically_zero}
    if fit.identically_zero:
        write_csv(os.path.join(out_dir, "scaling.csv"),
                  ("N", "lhs", "rhs"), rows)
        return 1, results, "identically-zero", {}
    n_lo, n_hi = (int(x) for x in p["convergence_pair"])
    lo = rescaled_inequality_sides(w, n_lo, quad_tol)
    hi = rescaled_inequality_sides(w, n_hi, quad_tol)
    rows += [(n_lo, lo[0], lo[1]), (n_hi, hi[0], hi[1])]
    write_csv(os.path.join(out_dir, "scaling.csv"), ("N", "lhs", "rhs"), rows)
    conv_lhs = abs(n_hi**3 * hi[0] - n_lo**3 * lo[0]) / abs(n_hi**3 * hi[0])
    conv_rhs = abs(n_hi**5 * hi[1] - n_lo**5 * lo[1]) / abs(n_hi**5 * hi[1])
    disc = discriminant_inequality_check(w, quad_tol)
    results.update({
        "compensated_convergence": {"lhs_rel_change": conv_lhs,
                                    "rhs_rel_change": conv_rhs},
        "discriminant_N1": {"lhs": disc[0], "rhs": disc[1], "holds": disc[2]},
    })
    ok = (fit.slope_lhs is not None
          and abs(fit.slope_lhs + 3.0) <= SLOPE_TOL
          and abs(fit.slope_rhs + 5.0) <= SLOPE_TOL
          and fit.crossover_N is not None)
    return (0 if ok else 1), results, \
        ("scaling-law-confirmed" if ok else "scaling-law-not-confirmed"), {}


def _run_example446(cfg: ExperimentConfig, out_dir: str):
    phi, psi = build_bumps(cfg)
    p = cfg.params
    variant = cfg.potential.get("variant", "auto")
    if variant == "auto":
        variant = select_example_446_variant(phi, psi)
    if p["u0_grid"] is not None:
        u0_grid = [float(x) for x in _grid(p["u0_grid"])]
    else:
        lo, hi = phi.support
        inset = 0.1 * (hi - lo)
        u0_grid = list(np.linspace(lo + inset, hi - inset, 11))
    rep = example_446_check(phi, psi, u0_grid, variant=variant,
                            fd_step=float(p["fd_step"]))
    header = ["t"] + ["u_leaf_%d" % j for j in range(len(rep.leaves))]
    ts = rep.leaves[0].t
    rows = [[float(t)] + [float(leaf.u[i]) for leaf in rep.leaves]
            for i, t in enumerate(ts)]
    write_csv(os.path.join(out_dir, "leaves.csv"), header, rows)
    results = {"variant": variant,
               "max_residual": rep.max_residual,
               "min_pairwise_gap": rep.min_pairwise_gap,
               "crossings": rep.crossings,
               "residuals": [leaf.max_residual for leaf in rep.leaves]}
    ok = rep.max_residual <= RESIDUAL_TOL and rep.crossings == 0
    return (0 if ok else 1), results, \
        ("leaves-verified" if ok else "leaves-not-verified"), {}


def _random_test_function(rng, r1, r2):
    span = r2 - r1
    width = rng.uniform(0.05 * span, 0.45 * span)
    center = rng.uniform(r1 + width, r2 - width)
    amplitude = rng.uniform(0.2, 2.0) * rng.choice((-1.0, 1.0))
    return make_bump(center, width, amplitude)


def _run_hardy(cfg: ExperimentConfig, out_dir: str):
    p = cfg.params
    rel_tol = float(p["rel_tol"])
    rng = np.random.default_rng(cfg.seed)
    rows, checks = [], []
    closed_forms = {3: 0.25, 4: 1.0 / 6.0}
    for n in p["n_list"]:
        n = int(n)
        if n in closed_forms:
            lhs, rhs = hardy_identity_check(lambda r: 1.0 - r, n, 0.0, 1.0,
                                            dxi=lambda r: -1.0)
            rel = abs(lhs - closed_forms[n]) / closed_forms[n]
            rows.append((n, "closed-form", lhs, rhs, rel))
            checks.append(rel <= rel_tol and abs(rhs - closed_forms[n])
                          <= rel_tol * closed_forms[n])
        for k in range(int(p["num_random"])):
            xi = _random_test_function(rng, float(p["r1"]), float(p["r2"]))
            lhs, rhs = hardy_identity_check(xi, n, float(p["r1"]),
                                            float(p["r2"]))
            rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
            rows.append((n, "random-%d" % k, lhs, rhs, rel))
            checks.append(rel <= rel_tol and lhs >= -1e-10)
    write_csv(os.path.join(out_dir, "results.csv"),
              ("n", "case", "lhs", "rhs", "rel_err"), rows)
    results = {"num_checks": len(checks),
               "num_passed": int(sum(checks)),
               "max_rel_err": max(r[4] for r in rows),
               "min_lhs": min(r[2] for r in rows)}
    ok = all(checks)
    return (0 if ok else 1), results, \
        ("identity-holds" if ok else "identity-violated"), {}


_RUNNERS = {
    "certify": _run_certify,
    "solve": _run_solve,
    "scan-conjugate": _run_scan,
    "foliate": _run_foliate,
    "rigidity-scaling": _run_scaling,
    "example446": _run_example446,
    "hardy-check": _run_hardy,
}


def run_command(cfg: ExperimentConfig, out_dir: str) -> tuple[int, dict]:
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.time()
    code, results, verdict, _ = _RUNNERS[cfg.command](cfg, out_dir)
    report = {"tool": "minfol", "version": __version__,
              "command": cfg.command, "config": cfg.raw,
              "results": results, "verdict": verdict, "exit_code": code}
    write_report(report, out_dir, wall_clock=time.time() - t0)
    return code, report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="minfol",
        description="Minimality certificates, solution foliations and the "
                    "planar rigidity experiment.")
    parser.add_argument("--config", required=True, metavar="PATH",
                        help="JSON experiment configuration")
    parser.add_argument("--out", default="out", metavar="DIR",
                        help="output directory (default: ./out)")
    parser.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="worker pool size (overrides config)")
    parser.add_argument("--seed", type=int, default=None, metavar="S",
                        help="random seed (overrides config)")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.jobs is not None:
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            cfg.jobs = args.jobs
            cfg.raw["jobs"] = args.jobs
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.raw["seed"] = args.seed
        code, _ = run_command(cfg, args.out)
        return code
    except MinfolError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except Exception as exc:  # unexpected failures also map to exit 2
        print("internal error: %s: %s" % (type(exc).__name__, exc),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

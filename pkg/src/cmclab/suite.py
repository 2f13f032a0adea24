"""The three analyses behind the CLI: analyze, foliate and verify."""

from __future__ import annotations

import math
import time
from dataclasses import replace

import numpy as np

from . import foliation as fol
from .errors import OracleMismatch
from .metric import adm_mass, conformal_factor, curvature_lower_bound, metric_invariants
from .report import SuiteResult, worst_of
from .solver import (
    BoundReport,
    check_area_radius_hawking,
    check_cmc_upper_bound,
    check_diameter_bound,
    check_hawking_monotonicity,
    check_penrose,
    find_cmc_between,
    find_hmax,
    inner_foliation_profile,
    local_maxima_of_h,
    validate_exterior_region,
)
from .sphere import area, mean_curvature, mean_curvature_derivative
from .stability import horizon_stability_check, principal_eigenvalue

DEFAULT_GRID = 2000
N_LEVELS = 20
SWEEP_POINTS = 200
ORACLE_GRID = 10_000
MARGINAL_TOL = 1e-6
IDENTITY_TOL = 1e-6
STATIONARITY_TOL = 1e-9
COUPLING_PAIRS = 100


def _named(report, name):
    return replace(report, name=name)


def default_levels(metric, n=N_LEVELS):
    """``n`` log-spaced levels in (0, H_max)."""
    h_max = find_hmax(metric).h_max
    return np.geomspace(1e-3 * h_max, 0.999 * h_max, n)


def analyze_values(metric) -> dict:
    region = validate_exterior_region(metric)
    hm = find_hmax(metric)
    inv = metric_invariants(metric)
    hs = horizon_stability_check(metric)
    return {
        "r_horizon": region.r_horizon,
        "horizon_area": region.horizon_area,
        "horizon_area_radius": region.horizon_area_radius,
        "adm_mass": inv.adm_mass,
        "c_lower": inv.c_lower,
        "nonneg_scalar": inv.nonneg_scalar,
        "h_max": hm.h_max,
        "r_star": hm.r_star,
        "all_maximizers": list(hm.all_maximizers),
        "horizon_lambda0": hs.principal,
        "horizon_branch": hs.branch,
    }


def _horizon_report(metric):
    hs = horizon_stability_check(metric)
    return BoundReport.compare(
        "horizon_stability", -hs.principal, 0.0, atol=1e-8,
        lambda0=hs.principal, branch=hs.branch,
    )


def analyze(metric) -> SuiteResult:
    t0 = time.perf_counter()
    values = analyze_values(metric)
    res = SuiteResult(metric.name, 0, summary=values)
    res.add(check_penrose(metric, adm=values["adm_mass"]), _horizon_report(metric))
    res.wall_time = time.perf_counter() - t0
    return res


def _oracle_report(metric, h, grid_n):
    r_h, r_star = fol.interior_region(metric)
    step = (r_star - r_h) / (grid_n - 1)
    target = fol.outermost_cmc_radius(metric, h)
    try:
        rho = fol.minimize_j_h_outside(metric, h, grid_n).outer_radius
    except OracleMismatch as exc:
        return BoundReport(
            name="j_h_oracle", lhs=math.nan, rhs=step, margin=math.nan,
            passed=False, sharp=False, reason=str(exc), details={"h": h},
        )
    return BoundReport.compare("j_h_oracle", abs(rho - target), step, tol=0.0, h=h, rho=rho, r_h=target)


def foliation_reports(metric, profile, levels, oracle_grid=ORACLE_GRID):
    """Per-level checks folded into one report each."""
    sweeps = {
        "j_h_oracle": [_oracle_report(metric, h, oracle_grid) for h in levels],
        "outward_area_minimizing": [fol.check_outward_area_minimizing(metric, h) for h in levels],
        "subsolution": [fol.check_subsolution(metric, profile, h) for h in levels],
    }
    sub = [fol.check_sublevel_sets(profile, h) for h in levels]
    sweeps["sublevel_strict"] = [s[0] for s in sub]
    sweeps["sublevel_closure"] = [s[1] for s in sub]
    out = [worst_of(name, reps) for name, reps in sweeps.items()]
    plateau_competitors = sum(r.details.get("plateau_competitors", 0) for r in sweeps["subsolution"])
    return out, plateau_competitors


def _plateau_summary(profile):
    return [{"r_lo": p.r_lo, "r_hi": p.r_hi, "value": p.value} for p in profile.plateaus]


def foliate(metric, grid=DEFAULT_GRID, levels=None):
    """Profile plus its BV checks, and the per-level checks when ``levels`` is given."""
    t0 = time.perf_counter()
    profile = fol.level_set_function(metric, grid)
    if levels is not None:
        for h in levels:
            fol.outermost_cmc_radius(metric, h)  # OutOfRange early
    res = SuiteResult(metric.name, grid)
    tv, cont = fol.bv_norm_check(profile)
    res.add(tv, cont)
    res.summary = {
        "r_horizon": profile.r_horizon,
        "r_star": profile.r_star,
        "h_max": profile.h_max,
        "plateaus": _plateau_summary(profile),
        "total_variation": tv.lhs,
    }
    if levels is not None:
        reports, n_plateau = foliation_reports(metric, profile, levels)
        res.add(*reports)
        res.summary["levels"] = list(levels)
        res.summary["plateau_competitors"] = n_plateau
    res.summary["checks"] = {r.name: ("skip" if r.skipped else r.passed) for r in res.reports}
    res.wall_time = time.perf_counter() - t0
    return profile, res


def _bound_reports(metric, sweep, r_star):
    norm, raw = check_cmc_upper_bound(metric, r_star)
    pairs = [check_cmc_upper_bound(metric, r) for r in sweep]
    return [
        _named(norm, "cmc_upper_bound[r_star]"),
        _named(raw, "cmc_upper_bound_raw[r_star]"),
        worst_of("cmc_upper_bound[sweep]", [p[0] for p in pairs]),
        worst_of("cmc_upper_bound_raw[sweep]", [p[1] for p in pairs]),
        _named(check_diameter_bound(metric, r_star), "diameter_bound[r_star]"),
        worst_of("diameter_bound[sweep]", [check_diameter_bound(metric, r) for r in sweep]),
        _named(check_area_radius_hawking(metric, r_star), "area_radius_hawking[r_star]"),
        worst_of("area_radius_hawking[sweep]", [check_area_radius_hawking(metric, r) for r in sweep]),
        check_penrose(metric),
        check_hawking_monotonicity(metric),
    ]


def _stability_reports(metric, sweep, r_star):
    lam_star = float(principal_eigenvalue(metric, r_star))
    maxima = [r for r, _ in local_maxima_of_h(metric)]
    lam_max = [abs(float(principal_eigenvalue(metric, r))) for r in maxima]
    phi, _, _ = conformal_factor(metric, sweep)
    resid = np.abs(mean_curvature_derivative(metric, sweep) - principal_eigenvalue(metric, sweep) * phi**2)
    k = int(np.argmax(resid))
    inner = inner_foliation_profile(metric)
    h_inner = np.asarray(inner.h_values)
    r_inner = np.asarray(inner.radii)
    inside = (r_inner > inner.radii[0]) & (r_inner <= inner.radii[0] + inner.delta)
    return [
        BoundReport.compare("marginal_stability[r_star]", abs(lam_star), MARGINAL_TOL, tol=0.0, lambda0=lam_star),
        BoundReport.compare(
            "marginal_stability[local_maxima]", max(lam_max), MARGINAL_TOL, tol=0.0,
            radii=maxima, lambda0=lam_max,
        ),
        BoundReport.compare(
            "mean_curvature_variation", float(resid[k]), IDENTITY_TOL, tol=0.0, worst_r=float(sweep[k]),
        ),
        _horizon_report(metric),
        BoundReport.compare(
            "inner_foliation", -float(np.min(h_inner[inside])), 0.0, tol=0.0,
            delta=inner.delta, first_max=inner.first_max,
        ),
    ]


def _solver_reports(metric, sweep, levels):
    region = validate_exterior_region(metric)
    r_star = find_hmax(metric).r_star
    roots = [find_cmc_between(metric, region.r_horizon, r_star, h) for h in levels]
    err = np.abs(mean_curvature(metric, np.array(roots)) - levels)
    areas = area(metric, sweep)
    return [
        BoundReport.compare("cmc_between_roundtrip", float(err.max()), STATIONARITY_TOL, tol=0.0),
        BoundReport.compare(
            "horizon_area_minimal", region.horizon_area, float(areas.min()), tol=1e-12,
        ),
    ]


def _profile_reports(metric, profile, levels):
    u, hv = profile.u_values, profile.h_values
    dev = max(
        float(np.max(-np.diff(u), initial=0.0)),
        abs(float(u[0])),
        abs(float(u[-1]) - profile.h_max),
        float(np.max(u - hv)),
    )
    u_def, step = fol.definitional_u(metric, profile.r_grid)
    radii = fol.outermost_cmc_radii(metric, levels)
    stationarity = float(np.max(np.abs(mean_curvature(metric, radii) - levels)))
    rng = np.random.default_rng(0)
    h_max = profile.h_max
    pairs = np.sort(rng.uniform(0.0, h_max, size=(COUPLING_PAIRS, 2)), axis=1)
    pairs = pairs[pairs[:, 0] > 0]
    r1 = fol.outermost_cmc_radii(metric, pairs[:, 0])
    r2 = fol.outermost_cmc_radii(metric, pairs[:, 1])
    return [
        BoundReport.compare("u_profile", dev, 0.0, tol=1e-12, u_first=float(u[0]), u_last=float(u[-1])),
        BoundReport.compare(
            "u_definitional", float(np.max(np.abs(u_def - u))), step, level_step=step,
        ),
        BoundReport.compare("stationarity", stationarity, STATIONARITY_TOL, tol=0.0),
        BoundReport.compare(
            "monotone_coupling", float(np.max(r1 - r2, initial=0.0)), 0.0, tol=0.0, n_pairs=len(pairs),
        ),
    ]


def _family_reports(metric, profile):
    h_max = profile.h_max
    limits = [0.5 * h_max] + [p.value for p in profile.plateaus]
    monotone, right = [], []
    for lim in limits:
        seq = lim + 0.5 * (h_max - lim) * 2.0 ** -np.arange(40)
        m, r = fol.check_family_properties(metric, seq, lim)
        monotone.append(m)
        right.append(r)
    return [worst_of("family_monotone", monotone), worst_of("family_right_limit", right)]


def verify(metric, grid=DEFAULT_GRID, levels=None) -> SuiteResult:
    t0 = time.perf_counter()
    values = analyze_values(metric)
    if levels is None:
        levels = default_levels(metric)
    levels = np.asarray(levels, dtype=float)
    for h in levels:
        fol.outermost_cmc_radius(metric, h)
    r_h, r_star = values["r_horizon"], values["r_star"]
    sweep = np.geomspace(r_h, metric.r_cutoff, SWEEP_POINTS)
    sweep = np.union1d(sweep, [r_star])

    res = SuiteResult(metric.name, grid, summary=values)
    res.add(*_bound_reports(metric, sweep, r_star))
    res.add(*_stability_reports(metric, sweep, r_star))
    res.add(*_solver_reports(metric, sweep, levels))

    profile = fol.level_set_function(metric, grid)
    res.add(*_profile_reports(metric, profile, levels))
    reports, n_plateau = foliation_reports(metric, profile, levels)
    res.add(*reports)
    res.add(*_family_reports(metric, profile))
    res.add(*fol.bv_norm_check(profile))
    res.summary.update(
        plateaus=_plateau_summary(profile),
        plateau_competitors=n_plateau,
        levels=list(levels),
        curvature_lower_bound=curvature_lower_bound(metric),
    )
    res.wall_time = time.perf_counter() - t0
    return res

"""Weak CMC foliation of the interior region (r_horizon, r_star).

For h in (0, H_max) the outermost CMC sphere has radius r(h), the largest
root of H(r) = h below r_star; the sets Omega_h = (r_horizon, r(h)) increase
with h.  The level-set function u(r) = inf{h : r in Omega_h} equals the
running minimum of H from the right, and is constant on the annuli that the
family jumps over (plateaus).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from . import numerics
from .errors import OracleMismatch, OutOfRange
from .metric import conformal_factor
from .solver import BoundReport, find_hmax, validate_exterior_region
from .sphere import FOUR_PI, area, mean_curvature

SCAN_POINTS = 4000
PLATEAU_TOL = 1e-8
SUBSOLUTION_TOL = 1e-6
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def interior_region(metric) -> Tuple[float, float]:
    """The annulus between the horizon and the innermost H_max sphere."""
    r_h = validate_exterior_region(metric).r_horizon
    return r_h, find_hmax(metric).r_star


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@functools.lru_cache(maxsize=64)
def _interior_minima(metric) -> Tuple[float, ...]:
    """Refined interior local minima of H on (r_horizon, r_star)."""
    r_h, r_star = interior_region(metric)
    r = np.linspace(r_h, r_star, SCAN_POINTS)
    h = mean_curvature(metric, r)
    out = []
    for i in numerics.local_minima(h):
        x, _ = numerics.golden_section_min(
            lambda t: float(mean_curvature(metric, t)), r[i - 1], r[i + 1], tol=1e-13
        )
        out.append(x)
    return tuple(out)


def _interior_grid(metric, n):
    r_h, r_star = interior_region(metric)
    r = np.union1d(np.linspace(r_h, r_star, n), _interior_minima(metric))
    h = mean_curvature(metric, r)
    h[0] = 0.0
    return r, h


@functools.lru_cache(maxsize=64)
def _scan(metric):
    r, h = _interior_grid(metric, SCAN_POINTS)
    return _frozen(r), _frozen(h)


def _check_level(metric, h):
    h_max = find_hmax(metric).h_max
    if not 0 < h <= h_max:
        raise OutOfRange(f"h={float(h):.12g} outside (0, {h_max:.12g}]")
    return h_max


def outermost_cmc_radii(metric, levels) -> np.ndarray:
    """Vectorised :func:`outermost_cmc_radius`."""
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    h_max = find_hmax(metric).h_max
    for h in levels:
        _check_level(metric, h)
    r, hv = _scan(metric)
    r_star = r[-1]
    idx = np.array([np.nonzero(hv <= h)[0][-1] for h in levels], dtype=int)
    top = (idx >= len(r) - 1) | (levels >= h_max)
    idx = np.minimum(idx, len(r) - 2)
    out = np.empty_like(levels)
    if np.any(~top):
        lv = levels[~top]
        out[~top] = numerics.bisect(
            lambda x: mean_curvature(metric, x) - lv, r[idx[~top]], r[idx[~top] + 1], rtol=1e-15
        )
    # r(H_max) := r_star by continuity
    out[top] = r_star
    return out


def outermost_cmc_radius(metric, h) -> float:
    """r(h): the largest radius in [r_horizon, r_star] with H = h."""
    return float(outermost_cmc_radii(metric, [h])[0])


def _cumulative(integrand, grid):
    """Cumulative integral of ``integrand`` on ``grid`` (8-point Gauss per cell)."""
    a, b = grid[:-1], grid[1:]
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES[None, :]
    cells = half * (integrand(x) @ _GL_WEIGHTS)
    return np.concatenate([[0.0], np.cumsum(cells)])


def _segment(integrand, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _GL_NODES
    return float(half * (integrand(x) @ _GL_WEIGHTS))


def volume_density(metric, s):
    phi, _, _ = conformal_factor(metric, s)
    return FOUR_PI * phi**6 * s**2


def volume(metric, rho, n_cells=64) -> float:
    """Vol of the annulus (r_horizon, rho): integral of 4 pi phi^6 s^2 ds."""
    r_h = validate_exterior_region(metric).r_horizon
    if rho <= r_h:
        return 0.0
    edges = np.linspace(r_h, rho, n_cells + 1)
    return float(_cumulative(lambda s: volume_density(metric, s), edges)[-1])


@dataclass(frozen=True)
class RadialSet:
    """The annulus F = (r_horizon, outer_radius)."""

    outer_radius: float

    def perimeter(self, metric):
        return float(area(metric, self.outer_radius))

    def volume(self, metric):
        return volume(metric, self.outer_radius)


@dataclass(frozen=True)
class Plateau:
    r_lo: float
    r_hi: float
    value: float


@dataclass(frozen=True, eq=False)
class FoliationProfile:
    metric: object
    r_horizon: float
    r_star: float
    h_max: float
    r_grid: np.ndarray
    h_values: np.ndarray
    u_values: np.ndarray
    plateaus: Tuple[Plateau, ...]
    n: int = 0
    # True when u is the running minimum of H; quadrature then uses H off the
    # plateaus instead of interpolating the samples.
    exact: bool = False

    def outermost_radius(self, h):
        return outermost_cmc_radius(self.metric, h)

    @property
    def plateau_mask(self):
        return self.u_values < self.h_values - PLATEAU_TOL

    def u_at(self, s):
        """u between grid points."""
        s = np.asarray(s, dtype=float)
        if not self.exact:
            return np.interp(s, self.r_grid, self.u_values)
        u = mean_curvature(self.metric, np.clip(s, self.r_horizon, self.r_star))
        u = np.where(s <= self.r_horizon, 0.0, u)
        for p in self.plateaus:
            u = np.where((s >= p.r_lo) & (s <= p.r_hi), p.value, u)
        return u

    @functools.cached_property
    def _quad_grid(self):
        edges = [p.r_lo for p in self.plateaus] if self.exact else []
        return np.union1d(self.r_grid, edges)

    @functools.cached_property
    def _u_volume(self):
        return _cumulative(self._u_density, self._quad_grid)

    def _u_density(self, s):
        return self.u_at(s) * volume_density(self.metric, s)

    def u_integral(self, rho):
        """Integral of u over the annulus (r_horizon, rho)."""
        g = self._quad_grid
        rho = min(max(rho, g[0]), g[-1])
        i = int(np.searchsorted(g, rho, side="right")) - 1
        i = min(i, len(g) - 2)
        return float(self._u_volume[i]) + _segment(self._u_density, g[i], rho)

    def with_u(self, u_values):
        """Copy with a replaced, sampled level-set function (plateaus recomputed)."""
        u = _frozen(u_values)
        return FoliationProfile(
            self.metric, self.r_horizon, self.r_star, self.h_max, self.r_grid,
            self.h_values, u, _plateaus(self.metric, self.r_grid, self.h_values, u), self.n,
        )


def _plateaus(metric, r, h, u):
    mask = u < h - PLATEAU_TOL
    out = []
    i = 0
    n = len(r)
    while i < n:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and mask[j + 1]:
            j += 1
        value = float(u[i])
        hi = float(r[min(j + 1, n - 1)])
        lo = float(r[i])
        if i > 0 and h[i - 1] <= value:
            lo = numerics.bisect(lambda x: mean_curvature(metric, x) - value, r[i - 1], r[i], rtol=1e-15)
        out.append(Plateau(r_lo=lo, r_hi=hi, value=value))
        i = j + 1
    return tuple(out)


def level_set_function(metric, n=2000) -> FoliationProfile:
    """Profile of u on [r_horizon, r_star] by one reverse sweep over the grid.

    The grid is ``n`` equispaced radii plus every refined interior local
    minimum of H, so plateau values are exact local minima.
    """
    if n < 2:
        raise ValueError("need at least 2 grid points")
    hm = find_hmax(metric)
    r, h = _interior_grid(metric, n)
    u = np.minimum.accumulate(h[::-1])[::-1]
    u[0] = 0.0
    return FoliationProfile(
        metric=metric,
        r_horizon=float(r[0]),
        r_star=hm.r_star,
        h_max=hm.h_max,
        r_grid=_frozen(r),
        h_values=_frozen(h),
        u_values=_frozen(u),
        plateaus=_plateaus(metric, r, h, u),
        n=n,
        exact=True,
    )


def definitional_u(metric, r_grid, n_levels=2000):
    """u(r) = min{h_k : r < r(h_k)} over an equispaced level grid; independent
    of the reverse sweep.  Returns ``(u, level_step)``."""
    h_max = find_hmax(metric).h_max
    levels = np.linspace(0.0, h_max, n_levels + 1)[1:]
    radii = outermost_cmc_radii(metric, levels)
    inside = np.asarray(r_grid)[:, None] < radii[None, :]
    u = np.where(inside, levels[None, :], np.inf).min(axis=1)
    u[~np.isfinite(u)] = h_max
    return u, h_max / n_levels


def j_h(metric, h, rho) -> float:
    """J_h(F) = |boundary| - h Vol(F) for F = (r_horizon, rho)."""
    return float(area(metric, rho)) - h * volume(metric, rho)


def j_u(metric, profile: FoliationProfile, rho) -> float:
    """J_u(F) = |boundary| - integral of u over F."""
    return float(area(metric, rho)) - profile.u_integral(rho)


def j_h_on_grid(metric, h, grid):
    r_h = validate_exterior_region(metric).r_horizon
    grid = np.asarray(grid, dtype=float)
    base = volume(metric, grid[0]) if grid[0] > r_h else 0.0
    vol = base + _cumulative(lambda s: volume_density(metric, s), grid)
    return area(metric, grid) - h * vol


def minimize_j_h_outside(metric, h, grid_n=10_000) -> RadialSet:
    """Brute-force J_h minimiser on the outside, cross-checked against r(h).

    Scans J_h over ``grid_n`` radii spanning the interior region.  The set
    minimising J_h among all larger radial sets, and bounded by a critical
    sphere, is the start of the final non-decreasing run of J_h.  It must
    match r(h) to within one grid step, otherwise OracleMismatch.
    """
    _check_level(metric, h)
    r_h, r_star = interior_region(metric)
    grid = np.linspace(r_h, r_star, grid_n)
    j = j_h_on_grid(metric, h, grid)
    drops = np.nonzero(np.diff(j) < 0)[0]
    k0 = int(drops[-1]) + 1 if len(drops) else 0
    rho = float(grid[k0])
    target = outermost_cmc_radius(metric, h)
    step = float(grid[1] - grid[0])
    if abs(rho - target) > step:
        raise OracleMismatch(
            f"brute-force J_h minimiser at {rho!r} but outermost CMC radius is {target!r} (h={h!r})"
        )
    outside = grid >= target
    if np.any(j[outside] < j_h(metric, h, target) - 1e-9 * max(1.0, abs(j[k0]))):
        raise OracleMismatch(f"Omega_h does not minimise J_h on the outside (h={h!r})")
    return RadialSet(rho)


def check_outward_area_minimizing(metric, h, grid_n=2000) -> BoundReport:
    """|Sigma_h| <= |boundary of F| for radial F containing Omega_h."""
    _check_level(metric, h)
    r_star = find_hmax(metric).r_star
    rho_h = outermost_cmc_radius(metric, h)
    grid = np.linspace(rho_h, r_star, grid_n)
    areas = area(metric, grid)
    k = int(np.argmin(areas))
    return BoundReport.compare(
        "outward_area_minimizing", area(metric, rho_h), areas[k],
        h=h, worst_rho=float(grid[k]), top_area=float(areas[-1]),
    )


def check_family_properties(metric, h_sequence, h_limit, tol=1e-6):
    """Monotonicity of r(h) along a decreasing sequence and the right limit
    r(h_k) -> r(h_limit).  Returns ``(monotone_report, limit_report)``."""
    seq = np.asarray(h_sequence, dtype=float)
    if np.any(np.diff(seq) > 0):
        raise ValueError("h_sequence must be non-increasing")
    if np.any(seq < h_limit):
        raise ValueError("h_sequence must lie above its limit")
    radii = outermost_cmc_radii(metric, seq)
    rise = float(np.max(np.diff(radii), initial=0.0))
    monotone = BoundReport.compare(
        "family_monotone", max(rise, 0.0), 0.0, tol=1e-12, n=len(seq),
    )
    r_lim = outermost_cmc_radius(metric, h_limit)
    limit = BoundReport.compare(
        "family_right_limit", abs(float(radii[-1]) - r_lim), tol, tol=0.0,
        h_limit=h_limit, r_limit=r_lim, r_last=float(radii[-1]),
    )
    return monotone, limit


def check_sublevel_sets(profile: FoliationProfile, h) -> Tuple[BoundReport, BoundReport]:
    """E_h = {u < h} lies in Omega_h and the closure of {u <= h} is the
    closure of Omega_h, both at grid resolution."""
    r, u = profile.r_grid, profile.u_values
    rho = profile.outermost_radius(h)
    cell = float(np.max(np.diff(r)))
    below = r[u < h]
    overshoot = float(below.max() - rho) if len(below) else -math.inf
    strict = BoundReport.compare("sublevel_strict", max(overshoot, 0.0), cell, tol=0.0, h=h)
    closed = r[u <= h]
    edge = float(closed.max()) if len(closed) else profile.r_horizon
    closure = BoundReport.compare("sublevel_closure", abs(edge - rho), cell, tol=0.0, h=h, r_h=rho)
    return strict, closure


def check_subsolution(metric, profile: FoliationProfile, h, n_competitors=200) -> BoundReport:
    """J_u(Omega_h) <= J_u(F) + 1e-6 for radial F containing the closure of
    Omega_h; competitors cover [r(h), r_star] and every plateau annulus."""
    rho_h = outermost_cmc_radius(metric, h)
    comps = [np.linspace(rho_h, profile.r_star, n_competitors)]
    for p in profile.plateaus:
        lo, hi = max(p.r_lo, rho_h), p.r_hi
        if hi > lo:
            comps.append(np.linspace(lo, hi, 22)[1:-1])
    comps = np.unique(np.concatenate(comps))
    base = j_u(metric, profile, rho_h)
    values = np.array([j_u(metric, profile, x) for x in comps])
    k = int(np.argmin(values))
    in_plateau = sum(
        int(np.sum((comps > p.r_lo) & (comps < p.r_hi))) for p in profile.plateaus
    )
    return BoundReport.compare(
        "subsolution", base, values[k], atol=SUBSOLUTION_TOL,
        h=h, n_competitors=len(comps), plateau_competitors=in_plateau, worst_rho=float(comps[k]),
    )


def total_variation(profile: FoliationProfile) -> float:
    """Integral of |du| weighted by the sphere area (trapezoid Stieltjes sum)."""
    a = area(profile.metric, profile.r_grid)
    return float(np.sum(0.5 * (a[1:] + a[:-1]) * np.abs(np.diff(profile.u_values))))


def bv_norm_check(profile: FoliationProfile) -> Tuple[BoundReport, BoundReport]:
    """TV(u) <= |Sigma_Hmax| H_max, and continuity of u: the largest grid jump
    must shrink under 2x refinement."""
    metric = profile.metric
    tv = total_variation(profile)
    bound = float(area(metric, profile.r_star)) * profile.h_max
    tv_report = BoundReport.compare("bv_norm", tv, bound, tv=tv)
    jump = float(np.max(np.abs(np.diff(profile.u_values)), initial=0.0))
    n = profile.n or len(profile.r_grid)
    fine = level_set_function(metric, 2 * n)
    fine_jump = float(np.max(np.abs(np.diff(fine.u_values)), initial=0.0))
    cont = BoundReport.compare(
        "u_continuity", fine_jump, 0.75 * jump, tol=1e-12, coarse_jump=jump, fine_jump=fine_jump,
    )
    return tv_report, cont

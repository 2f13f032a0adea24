"""Horizon location, CMC spheres between barriers, H_max and the CMC bounds."""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import numerics
from .errors import BarrierViolation, NoHorizon, NonConvergence, NotOutermost
from .metric import ConformalMetric, check_asymptotics, curvature_lower_bound, scalar_curvature
from .sphere import (
    FOUR_PI,
    SIXTEEN_PI,
    area,
    area_radius,
    hawking_mass,
    mean_curvature,
    mean_curvature_derivative,
)
from .stability import is_strongly_stable, principal_eigenvalue

SCAN_POINTS = 10_000
ROOT_RTOL = 1e-14
MAXIMIZER_RTOL = 1e-8
BOUND_TOL = 1e-9
SHARP_TOL = 1e-8


def _scan(metric, lo, hi, n=SCAN_POINTS):
    r = np.geomspace(lo, hi, n)
    return r, mean_curvature(metric, r)


@functools.lru_cache(maxsize=128)
def _horizon_roots(metric: ConformalMetric):
    r, h = _scan(metric, metric.r_min, metric.r_cutoff)
    idx = numerics.sign_changes(h)
    if len(idx) == 0:
        raise NoHorizon(
            f"no minimal sphere in [{metric.r_min}, {metric.r_cutoff}]"
            f" (H {'> 0' if h[0] > 0 else '< 0'} throughout)"
        )
    roots = numerics.bisect(lambda x: mean_curvature(metric, x), r[idx], r[idx + 1], rtol=ROOT_RTOL)
    return tuple(float(x) for x in np.unique(roots))


def find_horizon(metric: ConformalMetric) -> float:
    """Largest radius with H = 0 (grid scan, then bisection)."""
    return _horizon_roots(metric)[-1]


@dataclass(frozen=True)
class ExteriorRegion:
    r_horizon: float
    horizon_area: float
    horizon_area_radius: float


@functools.lru_cache(maxsize=128)
def validate_exterior_region(metric: ConformalMetric) -> ExteriorRegion:
    """Check that the horizon is the only minimal sphere and H > 0 outside it.

    Raises NotOutermost listing every other radius where H vanishes, including
    tangential zeros between grid points.
    """
    check_asymptotics(metric)
    roots = _horizon_roots(metric)
    r_h = roots[-1]
    offending = list(roots[:-1])
    r, h = _scan(metric, r_h, metric.r_cutoff)
    if np.any(h[1:] <= 0):
        offending.extend(float(x) for x in r[1:][h[1:] <= 0])
    for i in numerics.local_minima(h):
        x, val = numerics.golden_section_min(
            lambda t: float(mean_curvature(metric, t)), r[i - 1], r[i + 1]
        )
        if val <= 0:
            offending.append(float(x))
    if offending:
        raise NotOutermost(
            "metric is not an exterior region: other minimal spheres at r = "
            + ", ".join(f"{x:.10g}" for x in sorted(offending)),
            radii=sorted(offending),
        )
    return ExteriorRegion(
        r_horizon=r_h,
        horizon_area=float(area(metric, r_h)),
        horizon_area_radius=float(area_radius(metric, r_h)),
    )


def find_cmc_between(metric, r_in, r_out, h, n=2000, tol=1e-12):
    """A radius in ``[r_in, r_out]`` with H = h.

    Requires h between the barrier values H(r_in) and H(r_out).  Among several
    roots the leftmost bracketed one is returned.
    """
    lo, hi = min(r_in, r_out), max(r_in, r_out)
    f_lo = float(mean_curvature(metric, lo)) - h
    f_hi = float(mean_curvature(metric, hi)) - h
    slack = tol * max(1.0, abs(h))
    if abs(f_lo) <= slack:
        return float(lo)
    if abs(f_hi) <= slack and f_lo * f_hi >= 0:
        return float(hi)
    if f_lo * f_hi > 0:
        raise BarrierViolation(
            f"h={h!r} is not between the barrier values H({lo})={f_lo + h!r} and H({hi})={f_hi + h!r}"
        )
    r = np.linspace(lo, hi, n)
    f = mean_curvature(metric, r) - h
    f[np.abs(f) <= slack] = 0.0
    # first sample leaving the sign of f(lo); a zero sample is itself a root
    i = int(np.argmax(np.sign(f) != np.sign(f_lo)))
    if f[i] == 0.0:
        return float(r[i])
    return numerics.bisect(lambda x: mean_curvature(metric, x) - h, r[i - 1], r[i], rtol=ROOT_RTOL)


@dataclass(frozen=True)
class HmaxResult:
    h_max: float
    r_star: float
    all_maximizers: Tuple[float, ...]


def _refine_max(metric, a, b):
    """Golden-section refinement, polished by bisection on the closed-form dH/dr."""
    x, _ = numerics.golden_section_max(lambda t: float(mean_curvature(metric, t)), a, b, tol=1e-12)
    da = float(mean_curvature_derivative(metric, a))
    db = float(mean_curvature_derivative(metric, b))
    if da > 0 > db:
        x = numerics.bisect(lambda t: mean_curvature_derivative(metric, t), a, b, rtol=ROOT_RTOL)
    return x, float(mean_curvature(metric, x))


@functools.lru_cache(maxsize=128)
def local_maxima_of_h(metric: ConformalMetric) -> Tuple[Tuple[float, float], ...]:
    """Every refined local maximum ``(r, H)`` of H on [r_horizon, r_cutoff]."""
    r_h = validate_exterior_region(metric).r_horizon
    r, h = _scan(metric, r_h, metric.r_cutoff)
    tail = r >= 0.9 * metric.r_cutoff
    if not np.all(np.diff(h[tail]) < 0):
        raise NonConvergence("H is not decreasing near r_cutoff; enlarge the domain")
    return tuple(_refine_max(metric, r[i - 1], r[i + 1]) for i in numerics.local_maxima(h))


@functools.lru_cache(maxsize=128)
def find_hmax(metric: ConformalMetric) -> HmaxResult:
    """Global maximum of H over [r_horizon, r_cutoff]; innermost maximiser wins ties."""
    candidates = local_maxima_of_h(metric)
    if not candidates:
        raise NonConvergence("H has no interior maximum on the domain")
    h_max = max(v for _, v in candidates)
    maximizers = sorted(x for x, v in candidates if v >= h_max * (1 - MAXIMIZER_RTOL))
    return HmaxResult(h_max=h_max, r_star=maximizers[0], all_maximizers=tuple(maximizers))


@dataclass(frozen=True)
class BoundReport:
    """One inequality ``lhs <= rhs``; ``margin = rhs - lhs``."""

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    sharp: bool
    skipped: bool = False
    reason: str = ""
    details: dict = field(default_factory=dict, hash=False, compare=False)

    @classmethod
    def compare(cls, name, lhs, rhs, tol=BOUND_TOL, sharp_tol=SHARP_TOL, atol=None, **details):
        """``passed`` allows ``tol`` relative slack, or ``atol`` absolute slack if given."""
        lhs, rhs = float(lhs), float(rhs)
        scale = max(1.0, abs(rhs))
        margin = rhs - lhs
        slack = tol * scale if atol is None else atol
        return cls(
            name=name,
            lhs=lhs,
            rhs=rhs,
            margin=margin,
            passed=lhs <= rhs + slack,
            sharp=abs(margin) <= sharp_tol * scale,
            details=details,
        )

    @classmethod
    def skip(cls, name, reason, **details):
        return cls(
            name=name, lhs=math.nan, rhs=math.nan, margin=math.nan,
            passed=True, sharp=False, skipped=True, reason=reason, details=details,
        )

    def to_dict(self):
        return asdict(self)


def check_cmc_upper_bound(metric, r) -> Tuple[BoundReport, BoundReport]:
    """Area-normalised bound H^2 <= 16pi/(3A) + 2C/3 and the raw form
    H^2 |S| <= 16pi/3 + 2C|S|/3, with A the horizon area.

    The raw form is the stability inequality tested with f = 1, so it is
    skipped on spheres that are not strongly stable (large spheres have
    H^2 |S| -> 16 pi).
    """
    region = validate_exterior_region(metric)
    r = float(r)
    c = curvature_lower_bound(metric)
    a_h = region.horizon_area
    a_r = float(area(metric, r))
    names = ("cmc_upper_bound", "cmc_upper_bound_raw")
    if r < region.r_horizon * (1 - 1e-12) or a_r < a_h * (1 - 1e-12):
        reason = f"sphere r={r:.12g} is not outside the horizon (|S_r|={a_r:.12g} < A={a_h:.12g})"
        return BoundReport.skip(names[0], reason, r=r), BoundReport.skip(names[1], reason, r=r)
    h = float(mean_curvature(metric, r))
    normalised = BoundReport.compare(
        names[0], h * h, SIXTEEN_PI / (3 * a_h) + 2.0 * c / 3.0, r=r, c_lower=c
    )
    if not is_strongly_stable(metric, r):
        raw = BoundReport.skip(names[1], f"sphere r={r:.12g} is not strongly stable", r=r)
    else:
        raw = BoundReport.compare(
            names[1], h * h * a_r, SIXTEEN_PI / 3 + 2.0 * c * a_r / 3.0, r=r, c_lower=c
        )
    return normalised, raw


def _stable_nonneg_precondition(metric, r, need_positive_h):
    if curvature_lower_bound(metric) > 1e-9:
        return "scalar curvature is not non-negative"
    if not is_strongly_stable(metric, r):
        return f"sphere r={r:.12g} is not strongly stable"
    if need_positive_h and not float(mean_curvature(metric, r)) > 0:
        return f"sphere r={r:.12g} has H <= 0"
    return None


def check_diameter_bound(metric, r) -> BoundReport:
    """Intrinsic diameter pi R against 2 pi / (sqrt(3) H).

    The literal constant 2 pi / (3 H) is reported alongside in ``details``.
    """
    r = float(r)
    reason = _stable_nonneg_precondition(metric, r, need_positive_h=True)
    if reason:
        return BoundReport.skip("diameter_bound", reason, r=r)
    h = float(mean_curvature(metric, r))
    diam = math.pi * float(area_radius(metric, r))
    literal = 2 * math.pi / (3 * h)
    return BoundReport.compare(
        "diameter_bound", diam, 2 * math.pi / (math.sqrt(3) * h),
        r=r, literal_rhs=literal, literal_violated=diam > literal * (1 + BOUND_TOL),
    )


def check_area_radius_hawking(metric, r) -> BoundReport:
    """R <= 3 m_H on strongly stable spheres when R_M >= 0."""
    r = float(r)
    reason = _stable_nonneg_precondition(metric, r, need_positive_h=False)
    if reason:
        return BoundReport.skip("area_radius_hawking", reason, r=r)
    return BoundReport.compare(
        "area_radius_hawking", area_radius(metric, r), 3 * hawking_mass(metric, r), r=r
    )


def check_penrose(metric, adm=None) -> BoundReport:
    """sqrt(|horizon| / 16 pi) <= m_ADM."""
    from .metric import adm_mass

    region = validate_exterior_region(metric)
    m = adm_mass(metric) if adm is None else adm
    return BoundReport.compare(
        "penrose", math.sqrt(region.horizon_area / SIXTEEN_PI), m, tol=1e-8,
        r_horizon=region.r_horizon,
    )


def check_hawking_monotonicity(metric, n=4000, slack=1e-8) -> BoundReport:
    """m_H(S_r) non-decreasing on [r_horizon, r_cutoff]; needs R_M >= 0."""
    if curvature_lower_bound(metric) > 1e-9:
        return BoundReport.skip("hawking_monotonicity", "scalar curvature is not non-negative")
    r_h = validate_exterior_region(metric).r_horizon
    r = np.geomspace(r_h, metric.r_cutoff, n)
    m = hawking_mass(metric, r)
    drops = m[:-1] - m[1:]
    worst = int(np.argmax(drops))
    return BoundReport.compare(
        "hawking_monotonicity", max(float(drops[worst]), 0.0), slack, tol=0.0,
        worst_r=float(r[worst]),
    )


@dataclass(frozen=True)
class InnerFoliation:
    radii: Tuple[float, ...]
    h_values: Tuple[float, ...]
    delta: float
    first_max: Optional[float]
    consistent: bool


def inner_foliation_profile(metric, n_steps=2000) -> InnerFoliation:
    """Sample H on [r_horizon, r_star] and find the largest delta such that H is
    strictly increasing on [r_horizon, r_horizon + delta]."""
    r_h = validate_exterior_region(metric).r_horizon
    if n_steps <= 1:
        return InnerFoliation((r_h,), (0.0,), 0.0, None, True)
    r_star = find_hmax(metric).r_star
    r = np.linspace(r_h, r_star, n_steps)
    h = mean_curvature(metric, r)
    h[0] = 0.0
    dec = np.nonzero(np.diff(h) <= 0)[0]
    first_max = None
    if len(dec):
        k = int(dec[0])
        lo, hi = r[max(k - 1, 0)], r[min(k + 1, n_steps - 1)]
        first_max, _ = _refine_max(metric, lo, hi)
        delta = first_max - r_h
    else:
        delta = r_star - r_h
        first_max = r_star
    inside = (r > r_h) & (r <= r_h + delta)
    consistent = bool(np.all(h[inside] > 0))
    return InnerFoliation(tuple(map(float, r)), tuple(map(float, h)), float(delta), first_max, consistent)


def marginal_stability_at(metric, r) -> float:
    return float(principal_eigenvalue(metric, float(r)))

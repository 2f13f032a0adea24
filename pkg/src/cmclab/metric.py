"""Spherically symmetric conformally flat metrics g = phi(r)^4 delta.

A :class:`ConformalMetric` pairs a radial profile (one of
:class:`Schwarzschild`, :class:`Tabulated`, :class:`Analytic`) with the
coordinate domain ``[r_min, r_cutoff]`` on which it is used.  All functions
accept scalars or numpy arrays of coordinate radii.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import minimize_scalar
from scipy.special import erf, erfc

from .errors import DomainError, NonConvergence, PositivityError

ArrayLike = Union[float, np.ndarray]

SQRT_PI = math.sqrt(math.pi)
# Relative slack when checking that a radius lies in the domain.
DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class Schwarzschild:
    mass: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("Schwarzschild mass must be positive")

    def evaluate(self, r, deriv_step):
        m = self.mass
        return 1.0 + m / (2 * r), -m / (2 * r**2), m / r**3

    @property
    def scale(self):
        return self.mass


@dataclass(frozen=True)
class Tabulated:
    """Samples ``(r, phi)`` interpolated by a quintic spline in ``log r``."""

    r: Tuple[float, ...]
    phi: Tuple[float, ...]

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        if r.ndim != 1 or r.shape != phi.shape:
            raise ValueError("tabulated r and phi must be 1-d and equal length")
        if len(r) < 200:
            raise ValueError(f"tabulated data needs at least 200 samples, got {len(r)}")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("tabulated radii must be positive and strictly ascending")
        if np.any(phi <= 0):
            raise ValueError("tabulated phi must be positive")

    @functools.cached_property
    def _spline(self):
        return make_interp_spline(np.log(self.r), np.asarray(self.phi), k=5)

    def evaluate(self, r, deriv_step):
        x = np.log(r)
        spl = self._spline
        phi = spl(x)
        phi_x = spl(x, 1)
        phi_xx = spl(x, 2)
        return phi, phi_x / r, (phi_xx - phi_x) / r**2

    @property
    def scale(self):
        # 2 r (phi - 1) at the outer sample estimates the mass.
        r_end, phi_end = self.r[-1], self.phi[-1]
        return max(abs(2 * r_end * (phi_end - 1.0)), 1e-3)


@dataclass(frozen=True)
class Bump:
    """A smooth radial term added to phi.

    shape ``gaussian``: ``amplitude * exp(-((r - center)/width)^2)``.
    shape ``compact``: ``amplitude * exp(1 - 1/(1 - x^2))`` for ``|x| < 1``,
    ``x = (r - center)/width``; derivatives by central differences.
    shape ``shell``: potential of the density shell
    ``rho = amplitude * exp(-((r - center)/width)^2)``, i.e. the solution of
    ``psi'' + 2 psi'/r = -rho`` decaying at infinity.  Adds
    ``8 rho / phi^5 >= 0`` to the scalar curvature.
    """

    center: float
    width: float
    amplitude: float
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape not in ("gaussian", "compact", "shell"):
            raise ValueError(f"unknown bump shape {self.shape!r}")
        if not self.width > 0:
            raise ValueError("bump width must be positive")

    @property
    def has_derivatives(self):
        return self.shape != "compact"

    def value(self, r):
        x = (r - self.center) / self.width
        if self.shape == "gaussian":
            return self.amplitude * np.exp(-x * x)
        if self.shape == "compact":
            x = np.asarray(x, dtype=float)
            inside = np.abs(x) < 1
            out = np.zeros_like(x)
            xi = x[inside]
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
            return self.amplitude * (out if out.ndim else float(out))
        return self._shell(r)[0]

    def derivatives(self, r):
        a, c, w = self.amplitude, self.center, self.width
        if self.shape == "gaussian":
            x = (r - c) / w
            g = a * np.exp(-x * x)
            return g, -2 * x / w * g, (4 * x * x - 2) / w**2 * g
        return self._shell(r)

    def _shell(self, r):
        a, c, w = self.amplitude, self.center, self.width
        t = (r - c) / w
        t0 = -c / w
        e = np.exp(-t * t)
        # antiderivative of s^2 rho(s) in s, up to the factor a
        def f2(tt, ee, erf_tt):
            return w * ((c * c + 0.5 * w * w) * 0.5 * SQRT_PI * erf_tt - c * w * ee - 0.5 * w * w * tt * ee)

        enclosed = a * (f2(t, e, erf(t)) - f2(t0, math.exp(-t0 * t0), math.erf(t0)))
        outer = a * w * (c * 0.5 * SQRT_PI * erfc(t) + 0.5 * w * e)
        rho = a * e
        psi = enclosed / r + outer
        dpsi = -enclosed / r**2
        d2psi = -rho + 2 * enclosed / r**3
        return psi, dpsi, d2psi

    def enclosed_total(self):
        """Integral of s^2 rho over (0, inf); the shell's share of the mass is twice this."""
        if self.shape != "shell":
            return 0.0
        a, c, w = self.amplitude, self.center, self.width
        t0 = -c / w
        e0 = math.exp(-t0 * t0)
        lo = w * ((c * c + 0.5 * w * w) * 0.5 * SQRT_PI * math.erf(t0) - c * w * e0 - 0.5 * w * w * t0 * e0)
        hi = w * (c * c + 0.5 * w * w) * 0.5 * SQRT_PI
        return a * (hi - lo)


@dataclass(frozen=True)
class Analytic:
    """phi = 1 + sum_i c_i/(2r) + sum_j bump_j(r)."""

    point_masses: Tuple[float, ...] = ()
    bumps: Tuple[Bump, ...] = ()

    def evaluate(self, r, deriv_step):
        c = float(sum(self.point_masses))
        phi = 1.0 + c / (2 * r)
        dphi = -c / (2 * r**2)
        d2phi = c / r**3
        for b in self.bumps:
            if b.has_derivatives:
                v, d1, d2 = b.derivatives(r)
            else:
                h = deriv_step * r
                v = b.value(r)
                vp, vm = b.value(r + h), b.value(r - h)
                d1 = (vp - vm) / (2 * h)
                d2 = (vp - 2 * v + vm) / (h * h)
            phi = phi + v
            dphi = dphi + d1
            d2phi = d2phi + d2
        return phi, dphi, d2phi

    @property
    def scale(self):
        m = sum(self.point_masses) + 2 * sum(b.enclosed_total() for b in self.bumps)
        return max(abs(m), 1e-3)


@dataclass(frozen=True)
class ConformalMetric:
    kind: Union[Schwarzschild, Tabulated, Analytic]
    r_min: float
    r_cutoff: float
    deriv_step: float = 1e-5
    asymptotic_tol: float = 1e-3
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not 0 < self.r_min < self.r_cutoff:
            raise ValueError(f"need 0 < r_min < r_cutoff, got {self.r_min}, {self.r_cutoff}")
        if not self.deriv_step > 0:
            raise ValueError("deriv_step must be positive")
        if isinstance(self.kind, Tabulated):
            lo, hi = self.kind.r[0], self.kind.r[-1]
            if self.r_min < lo * (1 - DOMAIN_SLACK) or self.r_cutoff > hi * (1 + DOMAIN_SLACK):
                raise ValueError("tabulated samples must cover [r_min, r_cutoff]")

    @property
    def scale(self):
        """Rough mass scale, used for default cutoffs and tolerances."""
        return self.kind.scale


def schwarzschild(mass=1.0, r_min=None, r_cutoff=None, **kwargs):
    """Spatial Schwarzschild of the given mass on ``[m/4, 10^4 m]`` by default."""
    r_min = 0.25 * mass if r_min is None else r_min
    r_cutoff = 1e4 * mass if r_cutoff is None else r_cutoff
    kwargs.setdefault("name", f"schwarzschild_m{mass:g}")
    return ConformalMetric(Schwarzschild(mass), r_min, r_cutoff, **kwargs)


def flat(r_min=0.1, r_cutoff=1e4):
    return ConformalMetric(Analytic(), r_min, r_cutoff, name="flat")


def _check_domain(metric, r):
    r_arr = np.asarray(r, dtype=float)
    lo = metric.r_min * (1 - DOMAIN_SLACK)
    hi = metric.r_cutoff * (1 + DOMAIN_SLACK)
    if np.any(~np.isfinite(r_arr)) or np.any(r_arr < lo) or np.any(r_arr > hi):
        bad = r_arr[(r_arr < lo) | (r_arr > hi) | ~np.isfinite(r_arr)]
        raise DomainError(
            f"radius {bad.flat[0]!r} outside domain [{metric.r_min}, {metric.r_cutoff}]"
        )


def conformal_factor(metric: ConformalMetric, r: ArrayLike):
    """Return ``(phi, phi', phi'')`` at coordinate radius ``r``."""
    _check_domain(metric, r)
    phi, dphi, d2phi = metric.kind.evaluate(r, metric.deriv_step)
    if np.any(np.asarray(phi) <= 0):
        raise PositivityError("conformal factor is not positive on the domain")
    return phi, dphi, d2phi


def scalar_curvature(metric: ConformalMetric, r: ArrayLike):
    """R_M = -8 phi^-5 (phi'' + 2 phi'/r)."""
    phi, dphi, d2phi = conformal_factor(metric, r)
    return -8.0 * (d2phi + 2.0 * dphi / r) / phi**5


def _log_grid(metric, n):
    return np.geomspace(metric.r_min, metric.r_cutoff, n)


@functools.lru_cache(maxsize=64)
def curvature_lower_bound(metric: ConformalMetric, n: int = 20000) -> float:
    """C = sup of max(0, -R_M) over the domain.

    Dense log grid followed by a bounded local refinement around the grid
    minimum of R_M.
    """
    r = _log_grid(metric, n)
    scal = scalar_curvature(metric, r)
    i = int(np.argmin(scal))
    best = float(scal[i])
    lo, hi = r[max(i - 1, 0)], r[min(i + 1, n - 1)]
    if hi > lo:
        res = minimize_scalar(
            lambda x: float(scalar_curvature(metric, x)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12 * hi},
        )
        best = min(best, float(res.fun))
    return max(0.0, -best)


def nonneg_scalar(metric: ConformalMetric, tol: float = 1e-9) -> bool:
    return curvature_lower_bound(metric) <= tol


def _mass_aspect(metric, r):
    _, dphi, _ = conformal_factor(metric, r)
    return -2.0 * r * r * dphi


def adm_mass(metric: ConformalMetric, tol: float = 1e-6) -> float:
    """ADM mass as the Richardson-extrapolated limit of -2 r^2 phi'.

    Assumes a ``1/r`` correction to the mass aspect; the extrapolants from
    the pairs ``(R, R/2)`` and ``(R/2, R/4)`` must agree to ``tol``
    (relative to the mass scale) or :class:`NonConvergence` is raised.
    """
    big = metric.r_cutoff
    f1, f2, f4 = (float(_mass_aspect(metric, big / k)) for k in (1, 2, 4))
    outer = 2 * f1 - f2
    inner = 2 * f2 - f4
    if abs(outer - inner) > tol * max(1.0, abs(outer)):
        raise NonConvergence(
            f"ADM mass extrapolants disagree: {outer!r} vs {inner!r}"
        )
    return outer


@dataclass(frozen=True)
class MetricInvariants:
    c_lower: float
    adm_mass: float
    nonneg_scalar: bool


def metric_invariants(metric: ConformalMetric) -> MetricInvariants:
    c = curvature_lower_bound(metric)
    return MetricInvariants(c_lower=c, adm_mass=adm_mass(metric), nonneg_scalar=c <= 1e-9)


def check_asymptotics(metric: ConformalMetric) -> float:
    """Return |phi(r_cutoff) - 1|, raising if it exceeds the asymptotic tolerance."""
    phi, _, _ = conformal_factor(metric, metric.r_cutoff)
    dev = abs(float(phi) - 1.0)
    if dev > metric.asymptotic_tol:
        raise NonConvergence(
            f"metric is not asymptotically flat at r_cutoff={metric.r_cutoff}: |phi - 1| = {dev:.3g}"
        )
    return dev


def validate_exterior_region(metric: ConformalMetric):
    """See :func:`cmclab.solver.validate_exterior_region`."""
    from .solver import validate_exterior_region as _validate

    return _validate(metric)

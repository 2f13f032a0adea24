"""Spectrum of the stability (Jacobi) operator on centered spheres.

On S_r the operator L f = -Laplace f - Q f has constant potential

    Q = R_M/2 - R_Sigma/2 + |A_0|^2/2 + 3 H^2/4,

with R_Sigma = 2/R^2 and trace-free second fundamental form A_0 = 0, so the
spherical harmonics diagonalise it: lambda_l = l(l+1)/R^2 - Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .metric import scalar_curvature
from .sphere import area_radius, mean_curvature

STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class StabilitySpectrum:
    r: float
    potential: float
    eigenvalues: Tuple[float, ...]
    strongly_stable: bool

    @property
    def principal(self):
        return self.eigenvalues[0]


def stability_potential(metric, r, traceless_sq=0.0):
    big_r = area_radius(metric, r)
    h = mean_curvature(metric, r)
    scal = scalar_curvature(metric, r)
    return 0.5 * scal - 1.0 / big_r**2 + 0.5 * traceless_sq + 0.75 * h * h


def principal_eigenvalue(metric, r):
    """lambda_0 = -Q, vectorised over r."""
    return -stability_potential(metric, r)


def stability_spectrum(metric, r, l_max: int = 8) -> StabilitySpectrum:
    if l_max < 2:
        raise ValueError("l_max must be at least 2")
    r = float(r)
    q = float(stability_potential(metric, r))
    big_r = float(area_radius(metric, r))
    ls = np.arange(l_max + 1)
    eig = ls * (ls + 1) / big_r**2 - q
    return StabilitySpectrum(
        r=r,
        potential=q,
        eigenvalues=tuple(float(x) for x in eig),
        strongly_stable=bool(eig[0] >= -STABILITY_TOL),
    )


def is_strongly_stable(metric, r) -> bool:
    return bool(principal_eigenvalue(metric, float(r)) >= -STABILITY_TOL)


@dataclass(frozen=True)
class HorizonStability:
    r_horizon: float
    principal: float
    branch: str  # "nondegenerate" or "degenerate"
    consistent: bool


def horizon_stability_check(metric, tol: float = 1e-8) -> HorizonStability:
    """Classify the horizon: lambda_0 > 0 gives the implicit-function branch of
    the inner CMC foliation, lambda_0 = 0 the degenerate one.

    Raises NoHorizon for metrics without a minimal sphere.
    """
    from .solver import find_horizon

    r_h = find_horizon(metric)
    lam = float(principal_eigenvalue(metric, r_h))
    branch = "degenerate" if abs(lam) <= tol else "nondegenerate"
    return HorizonStability(r_horizon=r_h, principal=lam, branch=branch, consistent=lam >= -tol)

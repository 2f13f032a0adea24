"""Geometry of the centered coordinate spheres S_r."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric import conformal_factor

FOUR_PI = 4.0 * math.pi
SIXTEEN_PI = 16.0 * math.pi


def area(metric, r):
    """|S_r| = 4 pi phi^4 r^2."""
    phi, _, _ = conformal_factor(metric, r)
    return FOUR_PI * phi**4 * r**2


def area_radius(metric, r):
    phi, _, _ = conformal_factor(metric, r)
    return phi**2 * r


def mean_curvature(metric, r):
    """H = 2/(r phi^2) * (1 + 2 r phi'/phi), outward normal."""
    phi, dphi, _ = conformal_factor(metric, r)
    return 2.0 / (r * phi**2) * (1.0 + 2.0 * r * dphi / phi)


def mean_curvature_derivative(metric, r):
    """dH/dr in coordinate radius, in closed form."""
    phi, dphi, d2phi = conformal_factor(metric, r)
    return (
        -2.0 / (r**2 * phi**2)
        - 4.0 * dphi / (r * phi**3)
        + 4.0 * d2phi / phi**3
        - 12.0 * dphi**2 / phi**4
    )


def hawking_mass(metric, r):
    """m_H = sqrt(|S|/16pi) (1 - H^2 |S| / 16pi); H is constant on S_r."""
    a = area(metric, r)
    h = mean_curvature(metric, r)
    return np.sqrt(a / SIXTEEN_PI) * (1.0 - h * h * a / SIXTEEN_PI)


@dataclass(frozen=True)
class SphereRecord:
    r: float
    area: float
    area_radius: float
    mean_curvature: float
    hawking_mass: float
    intrinsic_diameter: float


def sphere_record(metric, r) -> SphereRecord:
    r = float(r)
    a = float(area(metric, r))
    big_r = math.sqrt(a / FOUR_PI)
    h = float(mean_curvature(metric, r))
    return SphereRecord(
        r=r,
        area=a,
        area_radius=big_r,
        mean_curvature=h,
        hawking_mass=float(hawking_mass(metric, r)),
        # the induced metric on a centered sphere is round
        intrinsic_diameter=math.pi * big_r,
    )

import math

import numpy as np
import pytest

from cmclab.errors import NoHorizon
from cmclab.metric import conformal_factor, scalar_curvature, schwarzschild
from cmclab.solver import find_hmax, local_maxima_of_h, validate_exterior_region
from cmclab.sphere import area_radius, mean_curvature, mean_curvature_derivative
from cmclab.stability import (
    horizon_stability_check,
    is_strongly_stable,
    principal_eigenvalue,
    stability_potential,
    stability_spectrum,
)

import corpus

R_STAR = 1 + math.sqrt(3) / 2


def test_spectrum_at_hmax_sphere(schw1):
    spectrum = stability_spectrum(schw1, R_STAR)
    assert abs(spectrum.principal) < 1e-8
    assert spectrum.strongly_stable


def test_spectrum_flat(flat_metric):
    spectrum = stability_spectrum(flat_metric, 1.0)
    assert abs(spectrum.principal + 2.0) < 1e-14
    assert not spectrum.strongly_stable


def test_spectrum_at_horizon(schw1):
    assert abs(stability_spectrum(schw1, 0.5).principal - 0.25) < 1e-14


def test_spectrum_structure(dip_nonneg):
    spectrum = stability_spectrum(dip_nonneg, 1.3, l_max=6)
    eig = np.array(spectrum.eigenvalues)
    assert len(eig) == 7
    assert np.all(np.diff(eig) > 0)
    assert eig[0] == -spectrum.potential
    big_r = float(area_radius(dip_nonneg, 1.3))
    assert np.allclose(eig, np.arange(7) * np.arange(1, 8) / big_r**2 - spectrum.potential, rtol=1e-14)


def test_potential_uses_round_sphere_curvature(dip):
    # Q = R_M/2 - R_Sigma/2 + 3H^2/4, R_Sigma = 2/R^2 on a round sphere
    r = 1.1
    big_r = float(area_radius(dip, r))
    q = 0.5 * float(scalar_curvature(dip, r)) - 0.5 * 2 / big_r**2 + 0.75 * float(mean_curvature(dip, r)) ** 2
    assert abs(float(stability_potential(dip, r)) - q) < 1e-14


def test_l_max_validation(schw1):
    with pytest.raises(ValueError):
        stability_spectrum(schw1, 1.0, l_max=1)


def test_is_strongly_stable_examples(schw1, flat_metric):
    assert is_strongly_stable(schw1, 0.6)
    assert not is_strongly_stable(schw1, 10.0)
    for r in (0.5, 1.0, 7.0):
        assert not is_strongly_stable(flat_metric, r)


def test_strong_stability_region_schwarzschild():
    mass = 1.0
    m = schwarzschild(mass)
    r = np.linspace(0.5, 5.0, 20001)
    stable = principal_eigenvalue(m, r) >= -1e-9
    expected = (2 * r - mass) / (2 * r + mass) <= 1 / math.sqrt(3)
    interior = np.abs(r - R_STAR) > 1e-6
    assert np.array_equal(stable[interior], expected[interior])
    # the boundary of the region is r_star
    boundary = r[np.nonzero(stable)[0][-1]]
    assert abs(boundary - R_STAR) < (r[1] - r[0])
    lo, hi = 1.8, 1.9
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if principal_eigenvalue(m, mid) > 0 else (lo, mid)
    assert abs(0.5 * (lo + hi) - R_STAR) < 1e-8


@pytest.mark.parametrize("mass", [0.5, 1.0, 2.0])
def test_mean_curvature_variation_identity(mass):
    # d/dr H(S_r) = lambda_0 phi^2: the constant mode of the lapse
    m = schwarzschild(mass)
    r = np.geomspace(m.r_min, m.r_cutoff, 20000)
    phi, _, _ = conformal_factor(m, r)
    assert np.max(np.abs(mean_curvature_derivative(m, r) - principal_eigenvalue(m, r) * phi**2)) < 1e-6


def test_mean_curvature_variation_identity_bump_metrics(dip, dip_nonneg, twin_peak, degenerate):
    for m in (dip, dip_nonneg, twin_peak, degenerate):
        r = np.geomspace(max(m.r_min, 0.3), 100, 5000)
        phi, _, _ = conformal_factor(m, r)
        assert np.max(np.abs(mean_curvature_derivative(m, r) - principal_eigenvalue(m, r) * phi**2)) < 1e-6


def test_marginal_stability_at_every_local_max():
    for m in corpus.corpus():
        for r, _ in local_maxima_of_h(m):
            assert abs(float(principal_eigenvalue(m, r))) < 1e-6, (m.name, r)


def test_horizon_stability_schwarzschild(schw1):
    hs = horizon_stability_check(schw1)
    assert abs(hs.principal - 0.25) < 1e-14
    assert hs.branch == "nondegenerate" and hs.consistent


def test_horizon_stability_degenerate(degenerate):
    hs = horizon_stability_check(degenerate)
    assert hs.branch == "degenerate" and hs.consistent
    r_h = hs.r_horizon
    big_r = float(area_radius(degenerate, r_h))
    # tuned so that R_M(r_h) = 2/R_h^2, i.e. Q(r_h) = 0
    assert abs(float(scalar_curvature(degenerate, r_h)) - 2 / big_r**2) < 1e-7
    assert validate_exterior_region(degenerate).r_horizon == r_h


def test_horizon_stability_flat(flat_metric):
    with pytest.raises(NoHorizon):
        horizon_stability_check(flat_metric)


def test_hmax_sphere_is_strongly_stable_across_corpus():
    for m in corpus.corpus():
        assert is_strongly_stable(m, find_hmax(m).r_star), m.name

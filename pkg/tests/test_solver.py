import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmclab.errors import BarrierViolation, NoHorizon
from cmclab.metric import schwarzschild
from cmclab.solver import (
    BoundReport,
    check_area_radius_hawking,
    check_cmc_upper_bound,
    check_diameter_bound,
    find_cmc_between,
    find_hmax,
    find_horizon,
    inner_foliation_profile,
    validate_exterior_region,
)
from cmclab.sphere import area, mean_curvature

import corpus

H_MAX = 2 / (3 * math.sqrt(3))
R_STAR = 1 + math.sqrt(3) / 2


def test_find_horizon_examples(schw1, flat_metric):
    assert abs(find_horizon(schw1) - 0.5) < 1e-10
    assert abs(find_horizon(schwarzschild(2.0)) - 1.0) < 1e-10
    with pytest.raises(NoHorizon):
        find_horizon(flat_metric)


def test_find_cmc_between_examples(schw1):
    r = find_cmc_between(schw1, 0.5, 1.866, 0.2)
    assert abs(float(mean_curvature(schw1, r)) - 0.2) < 1e-10
    # dense grid oracle: unique crossing
    grid = np.linspace(0.5, 1.866, 100001)
    crossing = grid[np.nonzero(np.diff(np.sign(mean_curvature(schw1, grid) - 0.2)))[0]]
    assert len(crossing) == 1 and abs(crossing[0] - r) < 2e-5
    assert find_cmc_between(schw1, 0.5, 1.866, 0.0) == 0.5
    h_out = float(mean_curvature(schw1, 1.866))
    assert find_cmc_between(schw1, 0.5, 1.866, h_out) == 1.866


def test_find_cmc_between_barrier_violation(schw1):
    with pytest.raises(BarrierViolation):
        find_cmc_between(schw1, 0.5, 1.0, 0.5)


def test_find_cmc_between_leftmost(dip):
    # H takes the value 0.3 three times on (0.5, r_star); leftmost wins
    r_star = find_hmax(dip).r_star
    r = find_cmc_between(dip, 0.5, r_star, 0.3)
    grid = np.linspace(0.5, r_star, 200001)
    h = mean_curvature(dip, grid) - 0.3
    first = grid[np.nonzero(np.diff(np.sign(h)))[0][0]]
    assert abs(r - first) < 1e-4


@settings(max_examples=80, deadline=None)
@given(st.floats(0.0, 1.0))
def test_find_cmc_between_roundtrip(t):
    m = schwarzschild(1.0)
    h = t * H_MAX
    r = find_cmc_between(m, 0.5, R_STAR, h)
    assert abs(float(mean_curvature(m, r)) - h) < 1e-9


def test_find_hmax_examples(schw1):
    res = find_hmax(schw1)
    assert abs(res.h_max - H_MAX) < 1e-12
    assert abs(res.r_star - R_STAR) < 1e-10
    assert res.all_maximizers == (res.r_star,)
    res2 = find_hmax(schwarzschild(2.0))
    assert abs(res2.h_max - 1 / (3 * math.sqrt(3))) < 1e-12


def test_find_hmax_twin_peak(twin_peak):
    res = find_hmax(twin_peak)
    assert len(res.all_maximizers) == 2
    assert res.r_star == min(res.all_maximizers)
    assert res.r_star < 1.5 and abs(res.all_maximizers[1] - R_STAR) < 1e-8
    heights = [float(mean_curvature(twin_peak, r)) for r in res.all_maximizers]
    assert abs(heights[0] - heights[1]) < 1e-8 * H_MAX


@pytest.mark.parametrize("kappa", [0.5, 2.0, 4.0])
def test_find_hmax_scale_covariance(kappa):
    base = find_hmax(schwarzschild(1.0))
    scaled = find_hmax(schwarzschild(kappa))
    assert abs(scaled.h_max - base.h_max / kappa) < 1e-8
    assert abs(scaled.r_star - kappa * base.r_star) < 1e-8 * kappa


@pytest.mark.parametrize("idx", range(7))
def test_hmax_matches_dense_grid(idx):
    m = corpus.corpus()[idx]
    res = find_hmax(m)
    r_h = validate_exterior_region(m).r_horizon
    grid = np.geomspace(r_h, m.r_cutoff, 200001)
    h = mean_curvature(m, grid)
    k = int(np.argmax(h))
    # Lipschitz slack of one cell: |H'| * cell width
    slack = float(np.max(np.abs(np.diff(h))))
    assert res.h_max >= h[k] - 1e-15
    assert res.h_max - h[k] <= slack
    assert abs(float(mean_curvature(m, res.r_star)) - res.h_max) < 1e-12


def test_cmc_upper_bound_at_hmax_sphere(schw1):
    norm, raw = check_cmc_upper_bound(schw1, R_STAR)
    assert abs(raw.lhs - 16 * math.pi / 3) < 1e-8 * 16 * math.pi / 3
    assert raw.sharp and raw.passed
    assert abs(norm.lhs - 4 / 27) < 1e-10 and abs(norm.rhs - 1 / 3) < 1e-10
    assert norm.passed and not norm.sharp


def test_cmc_upper_bound_at_horizon(schw1):
    norm, raw = check_cmc_upper_bound(schw1, 0.5)
    assert norm.lhs < 1e-30 and norm.passed and raw.passed


def test_cmc_upper_bound_inside_horizon_skipped(schw1):
    norm, raw = check_cmc_upper_bound(schw1, 0.3)
    assert norm.skipped and raw.skipped


def test_cmc_upper_bound_raw_needs_strong_stability(schw1):
    norm, raw = check_cmc_upper_bound(schw1, 50.0)
    assert norm.passed and raw.skipped
    # the raw form genuinely fails there: H^2 |S| tends to 16 pi
    h = float(mean_curvature(schw1, 50.0))
    assert h * h * float(area(schw1, 50.0)) > 16 * math.pi / 3


def test_cmc_upper_bound_negative_scalar(negative_scalar):
    m = negative_scalar
    r_h = validate_exterior_region(m).r_horizon
    for r in np.geomspace(r_h, m.r_cutoff, 400):
        norm, raw = check_cmc_upper_bound(m, r)
        assert norm.passed
        assert abs(norm.details["c_lower"] - 0.2) < 1e-6
        assert abs(norm.rhs - (16 * math.pi / (3 * float(area(m, r_h))) + 2 / 3 * 0.2)) < 1e-6
        assert raw.skipped or raw.passed


def test_cmc_upper_bound_whole_corpus():
    for m in corpus.corpus() + [corpus.degenerate_horizon()]:
        r_h = validate_exterior_region(m).r_horizon
        for r in np.geomspace(r_h, m.r_cutoff, 300):
            norm, raw = check_cmc_upper_bound(m, r)
            assert norm.passed, (m.name, r)
            assert raw.skipped or raw.passed, (m.name, r)


def test_horizon_area_is_minimal_across_corpus():
    for m in corpus.corpus():
        region = validate_exterior_region(m)
        areas = area(m, np.geomspace(region.r_horizon, m.r_cutoff, 5000))
        assert np.all(areas >= region.horizon_area * (1 - 1e-14))


def test_diameter_bound_examples(schw1):
    rep = check_diameter_bound(schw1, R_STAR)
    assert rep.passed and rep.sharp
    assert abs(rep.lhs - 3 * math.pi) < 1e-8
    assert rep.details["literal_violated"]
    assert abs(rep.details["literal_rhs"] - math.sqrt(3) * math.pi) < 1e-8
    rep = check_diameter_bound(schw1, 0.6)
    assert rep.passed and rep.margin > 0.1
    assert check_diameter_bound(schw1, 10.0).skipped


def test_area_radius_hawking_examples(schw1, flat_metric):
    rep = check_area_radius_hawking(schw1, R_STAR)
    assert rep.passed and rep.sharp and abs(rep.lhs - 3) < 1e-12
    rep = check_area_radius_hawking(schw1, 0.5)
    assert rep.passed and abs(rep.lhs - 2) < 1e-12 and abs(rep.rhs - 3) < 1e-12
    assert check_area_radius_hawking(flat_metric, 1.0).skipped


def test_bound_report_compare():
    rep = BoundReport.compare("x", 1.0, 1.0 + 1e-10)
    assert rep.passed and rep.sharp
    rep = BoundReport.compare("x", 1.0 + 1e-8, 1.0)
    assert not rep.passed
    rep = BoundReport.compare("x", 1.0 + 1e-8, 1.0, atol=1e-7)
    assert rep.passed
    assert BoundReport.skip("x", "why").passed


def test_inner_foliation_schwarzschild(schw1):
    inner = inner_foliation_profile(schw1)
    assert abs(inner.delta - (R_STAR - 0.5)) < 1e-12
    assert inner.consistent


def test_inner_foliation_dip(dip):
    inner = inner_foliation_profile(dip)
    h = np.asarray(inner.h_values)
    first_drop = np.nonzero(np.diff(h) <= 0)[0][0]
    assert abs(0.5 + inner.delta - inner.first_max) < 1e-12
    assert inner.radii[first_drop - 1] <= inner.first_max <= inner.radii[first_drop + 1]
    assert inner.first_max < find_hmax(dip).r_star
    assert inner.consistent


def test_inner_foliation_single_sample(schw1):
    inner = inner_foliation_profile(schw1, n_steps=1)
    assert len(inner.radii) == 1 and abs(inner.radii[0] - 0.5) < 1e-12
    assert inner.h_values == (0.0,)


def test_inner_foliation_degenerate(degenerate):
    inner = inner_foliation_profile(degenerate)
    assert inner.consistent and inner.delta > 0

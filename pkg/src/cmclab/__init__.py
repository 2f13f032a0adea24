"""Numerical laboratory for CMC spheres and weak CMC foliations in
spherically symmetric, conformally flat exterior regions."""

__version__ = "0.1.0"


def clear_caches():
    """Drop memoised horizon, H_max and scan results (for cold-start timing)."""
    from . import foliation, metric, solver

    for fn in (
        metric.curvature_lower_bound,
        solver._horizon_roots,
        solver.validate_exterior_region,
        solver.local_maxima_of_h,
        solver.find_hmax,
        foliation._interior_minima,
        foliation._scan,
    ):
        fn.cache_clear()

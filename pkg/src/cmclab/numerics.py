"""Small bracketing solvers shared by the solvers and the foliation code."""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI2 = (3 - math.sqrt(5)) / 2


def bisect(f, lo, hi, rtol=1e-14, xtol=0.0, max_iter=200):
    """Vectorised bisection for sign-changing brackets ``[lo, hi]``.

    ``f`` must accept arrays.  A bracket end where ``f`` vanishes exactly is
    returned as is.  Scalars in, scalar out.
    """
    scalar = np.ndim(lo) == 0 and np.ndim(hi) == 0
    lo = np.atleast_1d(np.asarray(lo, dtype=float)).copy()
    hi = np.atleast_1d(np.asarray(hi, dtype=float)).copy()
    flo = np.asarray(f(lo), dtype=float)
    fhi = np.asarray(f(hi), dtype=float)
    if np.any(flo * fhi > 0):
        raise ValueError("bisect: f does not change sign on every bracket")
    done_lo = flo == 0
    done_hi = (fhi == 0) & ~done_lo
    slo = np.sign(flo)
    for _ in range(max_iter):
        width = hi - lo
        if np.all(width <= xtol + rtol * np.maximum(np.abs(lo), np.abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        fm = np.asarray(f(mid), dtype=float)
        same = np.sign(fm) == slo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        exact = fm == 0
        lo = np.where(exact, mid, lo)
        hi = np.where(exact, mid, hi)
    root = 0.5 * (lo + hi)
    root = np.where(done_lo, lo, root)
    root = np.where(done_hi, hi, root)
    return float(root[0]) if scalar else root


def golden_section_max(f, a, b, tol=1e-12):
    """Maximise a unimodal scalar function on ``[a, b]``; returns ``(x, f(x))``."""
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    while h > tol * max(1.0, abs(a)):
        if fc > fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)


def golden_section_min(f, a, b, tol=1e-12):
    x, fx = golden_section_max(lambda t: -f(t), a, b, tol)
    return x, -fx


def sign_changes(values):
    """Indices ``i`` with ``values[i] == 0`` or a strict sign change on ``[i, i+1]``."""
    v = np.asarray(values)
    change = (v[:-1] * v[1:] < 0) | (v[:-1] == 0)
    return np.nonzero(change)[0]


def local_maxima(values):
    v = np.asarray(values)
    return np.nonzero((v[1:-1] >= v[:-2]) & (v[1:-1] >= v[2:]) & ((v[1:-1] > v[:-2]) | (v[1:-1] > v[2:])))[0] + 1


def local_minima(values):
    return local_maxima(-np.asarray(values))

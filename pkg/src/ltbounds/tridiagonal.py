"""Symmetric tridiagonal eigenvalue primitives: Sturm counts, bisection, inverse iteration."""

import math

import numpy as np
from scipy.linalg import solve_banded

from .errors import NotConverged

_TINY = 1e-300


def sturm_count(diag, off, x):
    """Number of eigenvalues of the symmetric tridiagonal matrix strictly below x.

    ``diag`` has length n and ``off`` length n - 1. Uses the LDL^T pivot recurrence
    q_i = (a_i - x) - b_{i-1}^2 / q_{i-1}; by Sylvester's law of inertia the number of
    negative pivots equals the number of eigenvalues below x.
    """
    d_list, b2_list = _as_lists(diag, off)
    return _count_lists(d_list, b2_list, x)


def _as_lists(diag, off):
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    return diag.tolist(), (off * off).tolist()


def _count_lists(d_list, b2_list, x):
    # hot loop for bisection: plain floats are several times faster than numpy scalars
    count = 0
    q = d_list[0] - x
    if q < 0.0:
        count = 1
    for a, b2 in zip(d_list[1:], b2_list):
        if q == 0.0:
            q = _TINY
        q = a - x - b2 / q
        if q < 0.0:
            count += 1
    return count


def gershgorin_bounds(diag, off):
    diag = np.asarray(diag, dtype=float)
    r = np.zeros_like(diag)
    a = np.abs(np.asarray(off, dtype=float))
    r[:-1] += a
    r[1:] += a
    return float(np.min(diag - r)), float(np.max(diag + r))


def bisect_eigenvalue(diag, off, k=0, lo=None, hi=None, rtol=4 * np.finfo(float).eps, max_iter=2200):
    """k-th smallest eigenvalue (0-based) by Sturm-sequence bisection.

    Returns (eigenvalue, (lo, hi)) with a guaranteed bracket: count(lo) <= k < count(hi).
    The loop also ends once lo and hi are adjacent floats, which is how an eigenvalue
    at exactly zero terminates (the iteration cap covers the full exponent range).
    """
    d_list, b2_list = _as_lists(diag, off)
    g_lo, g_hi = gershgorin_bounds(diag, off)
    lo = g_lo if lo is None else lo
    hi = g_hi if hi is None else hi
    # widen user-supplied brackets until they are valid
    span = max(hi - lo, 1.0)
    while _count_lists(d_list, b2_list, lo) > k:
        lo -= span
        span *= 2
    span = max(hi - lo, 1.0)
    while _count_lists(d_list, b2_list, hi) <= k:
        hi += span
        span *= 2
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count_lists(d_list, b2_list, mid) > k:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * max(abs(lo), abs(hi)):
            break
    else:
        raise NotConverged("bisection hit the iteration cap")
    return 0.5 * (lo + hi), (lo, hi)


def tridiag_matvec(diag, off, v):
    out = diag * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return out


def inverse_iteration(diag, off, shift, n_iter=3, seed_vector=None):
    """Eigenvector for the eigenvalue nearest ``shift`` (unit 2-norm)."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    v = np.ones(n) if seed_vector is None else np.array(seed_vector, dtype=float)
    v /= np.linalg.norm(v)
    nudge = 1e-13 * max(abs(shift), 1.0)
    done = 0
    while done < n_iter:
        try:
            w = solve_banded((1, 1), ab, v, check_finite=False)
            nrm = np.linalg.norm(w)
        except np.linalg.LinAlgError:
            nrm = math.nan
        if not math.isfinite(nrm) or nrm == 0.0:
            # shift hit the eigenvalue to machine precision; nudge it and retry
            ab[1] -= nudge
            nudge *= 10.0
            if nudge > 1e-3 * max(abs(shift), 1.0):
                raise NotConverged("inverse iteration shift stays singular")
            continue
        v = w / nrm
        done += 1
    return v


def rayleigh_quotient(diag, off, v):
    return float(v @ tridiag_matvec(np.asarray(diag, float), np.asarray(off, float), v) / (v @ v))

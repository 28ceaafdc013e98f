"""Adaptive Gauss-Kronrod (7/15) quadrature and half-line integrals in the log variable."""

import heapq
import math

import numpy as np

from .errors import QuadratureNotConverged

# QUADPACK qk15 nodes/weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes xgk[1], xgk[3], xgk[5], xgk[7]
for _i, _w in zip((1, 3, 5), _WG[:3]):
    GAUSS_WEIGHTS[_i] = _w
    GAUSS_WEIGHTS[14 - _i] = _w
GAUSS_WEIGHTS[7] = _WG[3]


def gk15(f, a, b):
    """Single Gauss-Kronrod panel. Returns (kronrod estimate, |kronrod - gauss|).

    ``f`` must accept a numpy array of abscissae.
    """
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * NODES
    y = np.asarray(f(x), dtype=float)
    k = half * float(KRONROD_WEIGHTS @ y)
    g = half * float(GAUSS_WEIGHTS @ y)
    return k, abs(k - g)


def adaptive_quad(f, a, b, epsabs=1e-10, epsrel=1e-13, limit=4000, initial_panels=8):
    """Adaptive bisection of the worst panel until the summed error meets
    max(epsabs, epsrel * |I|).

    Returns (integral, error estimate). Raises QuadratureNotConverged when the panel
    budget runs out.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("adaptive_quad needs a finite interval")
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = np.linspace(a, b, initial_panels + 1)
    heap = []
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = gk15(f, lo, hi)
        heapq.heappush(heap, (-e, lo, hi, val))
        total += val
        err += e
    min_width = 1e-13 * (b - a)
    while err > max(epsabs, epsrel * abs(total)):
        if len(heap) >= limit:
            raise QuadratureNotConverged(
                f"error {err:.3e} above tolerance after {len(heap)} panels on [{a}, {b}]"
            )
        neg_e, lo, hi, val = heapq.heappop(heap)
        if hi - lo < min_width:
            raise QuadratureNotConverged(f"panel collapsed near {lo} with error {-neg_e:.3e}")
        mid = 0.5 * (lo + hi)
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - val
        err += e1 + e2 + neg_e
        # re-sum occasionally to avoid drift from incremental updates
        if len(heap) % 64 == 0:
            total = math.fsum(item[3] for item in heap)
            err = math.fsum(-item[0] for item in heap)
    total = math.fsum(item[3] for item in heap)
    return sign * total, err


def integrate_log(g, s_lo, s_hi, epsabs=1e-10, epsrel=1e-13, max_extensions=40):
    """Integrate g(s) over the real line, starting on [s_lo, s_hi].

    The window is widened by its own width on each side for as long as the added
    pieces are not negligible, so a slightly misplaced window is harmless provided g
    decays at both ends.
    """
    total, err = adaptive_quad(g, s_lo, s_hi, epsabs, epsrel)
    width = s_hi - s_lo
    lo, hi = s_lo, s_hi
    for side in (-1, 1):
        for _ in range(max_extensions):
            if side < 0:
                piece, e = adaptive_quad(g, lo - width, lo, epsabs, epsrel)
                lo -= width
            else:
                piece, e = adaptive_quad(g, hi, hi + width, epsabs, epsrel)
                hi += width
            total += piece
            err += e
            if abs(piece) <= max(epsabs, epsrel * abs(total)) * 1e-2:
                break
        else:
            raise QuadratureNotConverged("integrand does not decay on the half-line")
    return total, err

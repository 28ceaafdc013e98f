"""R_d by two independent routes.

Route A (closed): R_d = (d/2) ((d+2) / (2 e_d))^{1 + 2/d} with e_d from the
finite-difference spectral solver.

Route B (variational): minimize

    1/R = (4/d^2) (int eta^2 t^{d+1} dt)^{2/d} int (d^2/(4t^2) eta^2 + eta'^2) t dt

over eta with int eta^2 t dt = 1. Writing eta(t) = g(s), s = ln t, the three pieces become

    K = int g'^2 + (d^2/4) g^2 ds,   P = int g^2 e^{(d+2)s} ds,   N = int g^2 e^{2s} ds,

and 1/R = (4/d^2) P^{2/d} K / N^{1+2/d}, which is degree-0 homogeneous in g. g is
piecewise linear on a uniform s-grid with g = 0 at both ends, so every iterate is an
admissible profile and its functional value is a rigorous lower estimate of R_d (up to
quadrature rounding). The minimization alternates the exact lam-infimum
lam = 2K/(dP) with an inverse-iteration step on the pencil (K + lam P, N); both
steps decrease the same joint functional.
"""

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_banded

from .constants import check_dimension
from .errors import NotConverged, RouteDisagreement
from .eta_profiles import optimize_trial_epsilon
from .radial_spectral import SpectralProblem, ground_state_energy
from .search import golden_section_min

AGREEMENT_TOL = 1e-3
DEFAULT_N_BASIS = 2000
MIN_N_BASIS = 16
_GAUSS_ORDER = 6


def rd_from_ed(d, e_d):
    if not e_d > 0:
        raise ValueError("e_d must be positive")
    return d / 2.0 * ((d + 2.0) / (2.0 * e_d)) ** (1.0 + 2.0 / d)


def infimum_identity_check(a, b, x):
    """Relative gap between a b^x and x^x/(1+x)^{1+x} min_lam lam^{-x} (a + lam b)^{1+x}."""
    if not (a > 0 and b > 0 and x > 0):
        raise ValueError("a, b, x must be positive")
    center = math.log(x * a / b)

    def f(u):
        lam = math.exp(u)
        return lam**-x * (a + lam * b) ** (1.0 + x)

    _, fmin = golden_section_min(f, center - 10.0, center + 10.0, rtol=1e-12)
    target = a * b**x
    return abs(x**x / (1.0 + x) ** (1.0 + x) * fmin - target) / target


# ---- route B: P1 finite elements in s = ln t -------------------------------------


def _weighted_mass(s, w):
    """Tridiagonal P1 mass matrix with weight e^{w s}, interior nodes only."""
    xg, wg = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    h = np.diff(s)
    x = s[:-1, None] + 0.5 * (xg[None, :] + 1.0) * h[:, None]
    ww = 0.5 * wg[None, :] * h[:, None] * np.exp(w * x)
    left = (s[1:, None] - x) / h[:, None]
    right = 1.0 - left
    main = np.zeros(s.size)
    main[:-1] += np.sum(ww * left * left, axis=1)
    main[1:] += np.sum(ww * right * right, axis=1)
    off = np.sum(ww * left * right, axis=1)
    return main[1:-1], off[1:-1]


def _stiffness(s):
    k = 1.0 / np.diff(s)
    return k[:-1] + k[1:], -k[1:-1]


def _matvec(main, off, g):
    y = main * g
    y[:-1] += off * g[1:]
    y[1:] += off * g[:-1]
    return y


@dataclass(frozen=True)
class VariationalSolution:
    value: float
    s: np.ndarray
    g: np.ndarray
    iterations: int
    history: tuple


def _default_window(d):
    # g ~ e^{d s/2} as s -> -inf; decay beyond s ~ 3 is super-exponential
    return -28.0 / d - 2.0, 3.0


def variational_minimize(d, n_basis=DEFAULT_N_BASIS, window=None, rtol=1e-13, max_iter=2000):
    if n_basis < MIN_N_BASIS:
        raise ValueError(f"n_basis must be >= {MIN_N_BASIS}")
    lo, hi = window or _default_window(d)
    s = np.linspace(lo, hi, n_basis + 2)
    a0, a1 = _stiffness(s)
    m0, m1 = _weighted_mass(s, 0.0)
    k0, k1 = a0 + d * d / 4.0 * m0, a1 + d * d / 4.0 * m1
    p0, p1 = _weighted_mass(s, d + 2.0)
    n0, n1 = _weighted_mass(s, 2.0)

    def parts(g):
        return g @ _matvec(k0, k1, g), g @ _matvec(p0, p1, g), g @ _matvec(n0, n1, g)

    def value(g):
        k, p, n = parts(g)
        return 1.0 / (4.0 / d**2 * p ** (2.0 / d) * k / n ** (1.0 + 2.0 / d))

    eps, _ = optimize_trial_epsilon(d)
    g = np.exp(-((s[1:-1] + eps / 2.0) ** 2) / (2.0 * eps))
    history = [value(g)]
    band = np.zeros((3, g.size))
    for it in range(1, max_iter + 1):
        k, p, _ = parts(g)
        lam = 2.0 * k / (d * p)
        band[0, 1:] = k1 + lam * p1
        band[1] = k0 + lam * p0
        band[2, :-1] = k1 + lam * p1
        # zero shift lies below the spectrum of the positive definite pencil
        g = solve_banded((1, 1), band, _matvec(n0, n1, g), check_finite=False)
        g /= math.sqrt(parts(g)[2])
        history.append(value(g))
        if abs(history[-1] - history[-2]) <= rtol * history[-1]:
            break
    else:
        raise NotConverged(f"variational route stalled at R = {history[-1]!r}")
    return VariationalSolution(float(history[-1]), s, g, it, tuple(float(v) for v in history))


def rd_variational(d, n_basis=DEFAULT_N_BASIS):
    """R_d from direct minimization of the product functional (route B)."""
    return variational_minimize(d, n_basis).value


# ---- combined ------------------------------------------------------------------------


@dataclass(frozen=True)
class RdResult:
    d: int
    value_closed: float
    value_variational: float
    agreement: float
    trial_lower_bound: float
    e_d: float
    e_d_error: float
    epsilon_star: float

    def to_dict(self):
        return asdict(self)


def rd_closed(d):
    gs = ground_state_energy(SpectralProblem(d))
    return rd_from_ed(d, gs.energy), gs


@lru_cache(maxsize=None)
def rd_value(d):
    """Both routes plus the Gaussian-log trial bound, cross-checked."""
    d = check_dimension(d)
    if d > 10:
        raise ValueError("rd_value supports 1 <= d <= 10")
    closed, gs = rd_closed(d)
    variational = rd_variational(d)
    agreement = abs(closed - variational) / closed
    eps, bound = optimize_trial_epsilon(d)
    if agreement >= AGREEMENT_TOL:
        raise RouteDisagreement(
            f"d={d}: closed route {closed!r} vs variational {variational!r} (rel. gap {agreement:.2e})"
        )
    return RdResult(
        d=d,
        value_closed=closed,
        value_variational=float(variational),
        agreement=float(agreement),
        trial_lower_bound=bound,
        e_d=gs.energy,
        e_d_error=gs.error_estimate,
        epsilon_star=eps,
    )

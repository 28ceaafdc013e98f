"""Closed-form constants: Thomas-Fermi constant, Rumin's ratio, Airy zero, R_1, R_2."""

import math
from fractions import Fraction
from functools import lru_cache

from .errors import NotConverged

# Ai(0) = 3^{-2/3} / Gamma(2/3),  Ai'(0) = -3^{-1/3} / Gamma(1/3)
AI_0 = 0.355028053887817
AI_PRIME_0 = -0.258819403792807

AIRY_BRACKET = (-3.0, -2.0)


def check_dimension(d):
    """Validate a dimension and return it as an int."""
    try:
        ok = not isinstance(d, (bool, str)) and int(d) == d and d >= 1
    except (TypeError, ValueError, OverflowError):
        ok = False
    if not ok:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def gamma_half_integer(d):
    """Exact Gamma(1 + d/2) for a positive integer d."""
    d = check_dimension(d)
    if d % 2 == 0:
        return float(math.factorial(d // 2))
    # (d/2)(d/2 - 1) ... (1/2) * sqrt(pi)
    prod = 1.0
    x = d / 2.0
    while x > 0:
        prod *= x
        x -= 1.0
    return prod * math.sqrt(math.pi)


def thomas_fermi_constant(d):
    """Semiclassical constant 4 pi d/(d+2) Gamma(1+d/2)^{2/d}."""
    d = check_dimension(d)
    return 4.0 * math.pi * d / (d + 2) * gamma_half_integer(d) ** (2.0 / d)


def rumin_ratio(d, exact=False):
    """Rumin's constant ratio d/(d+4); a Fraction when ``exact``."""
    d = check_dimension(d)
    r = Fraction(d, d + 4)
    return r if exact else float(r)


def _airy_series(z, tol=1e-17, max_terms=200):
    # Ai(z) = Ai(0) f(z) + Ai'(0) g(z) with the two Maclaurin solutions of w'' = z w;
    # returns (Ai(z), Ai'(z)).
    z3 = z * z * z
    f, fp = 1.0, 0.0
    g, gp = z, 1.0
    tf, tg = 1.0, z
    for k in range(1, max_terms):
        tf *= z3 / ((3 * k - 1) * (3 * k))
        tg *= z3 / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        fp += 3 * k * tf / z if z != 0.0 else 0.0
        gp += (3 * k + 1) * tg / z if z != 0.0 else 0.0
        if abs(tf) + abs(tg) < tol * (abs(f) + abs(g)):
            break
    return AI_0 * f + AI_PRIME_0 * g, AI_0 * fp + AI_PRIME_0 * gp


def airy_ai(z):
    """Ai(z) for moderate real z, from the Maclaurin series."""
    return _airy_series(float(z))[0]


def airy_ai_prime(z):
    return _airy_series(float(z))[1]


@lru_cache(maxsize=None)
def airy_first_zero():
    """Largest real zero of Ai, found by bisection on the power series plus Newton polish."""
    lo, hi = AIRY_BRACKET
    f_lo, f_hi = airy_ai(lo), airy_ai(hi)
    if not (f_lo < 0.0 < f_hi):
        raise NotConverged("Airy bracket does not straddle a sign change")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = airy_ai(mid)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    else:
        raise NotConverged("Airy zero bisection did not terminate")
    a = 0.5 * (lo + hi)
    ai, aip = _airy_series(a)
    a_newton = a - ai / aip
    if abs(a_newton - a) < 1e-12:
        a = a_newton
    return a


def exact_R1():
    """R_1 = (-3/a)^3 / 16 with a the largest Airy zero."""
    a = airy_first_zero()
    return (-3.0 / a) ** 3 / 16.0


def exact_R2():
    return 0.25

"""Golden-section search for unimodal scalar functions."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_min(f, a, b, rtol=1e-10, max_iter=500):
    """Minimize a unimodal ``f`` on [a, b].

    Stops once the bracket width is below rtol * max(1, |x|). Returns (x_min, f(x_min)).
    """
    a, b = min(a, b), max(a, b)
    c = a + INV_PHI2 * (b - a)
    e = a + INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    for _ in range(max_iter):
        if b - a <= rtol * max(1.0, abs(c)):
            break
        if fc < fe:
            b, e, fe = e, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + INV_PHI * (b - a)
            fe = f(e)
    if fc < fe:
        return c, fc
    return e, fe


def golden_section_max(f, a, b, rtol=1e-10, max_iter=500):
    x, neg = golden_section_min(lambda y: -f(y), a, b, rtol, max_iter)
    return x, -neg

"""Weight profiles eta on (0, inf), their moments, and the Gaussian-in-log trial family.

All half-line integrals are done in the variable s = ln t, where the profiles of
interest decay faster than any exponential.
"""

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import NormalizationViolated
from .quadrature import integrate_log
from .search import golden_section_max

NORM_TOL_CONSTRUCTOR = 1e-8
NORM_TOL_OBJECTIVE = 1e-6
FD_REL_STEP = 1e-5
# central differences at FD_REL_STEP carry ~1e-10 relative noise
FD_QUAD_RTOL = 1e-9


@dataclass(frozen=True)
class EtaProfile:
    """A weight function eta on (0, inf).

    ``evaluator`` and ``derivative`` take numpy arrays. ``support`` is a
    (t_min, t_max) window outside which eta^2 is negligible; it only seeds the
    quadrature window.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    support: Tuple[float, float]
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "custom"

    def __call__(self, t):
        return self.evaluator(np.asarray(t, dtype=float))

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.derivative is not None:
            return self.derivative(t)
        h = FD_REL_STEP * t
        return (self.evaluator(t + h) - self.evaluator(t - h)) / (2.0 * h)

    @property
    def log_window(self):
        lo, hi = self.support
        return math.log(lo), math.log(hi)


@dataclass(frozen=True)
class GaussianLogParams:
    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be a positive finite number, got {self.epsilon!r}")


@dataclass(frozen=True)
class MomentTable:
    d: int
    m_norm_log: float
    m_norm_lin: float
    m_top: float
    m_grad: float

    def to_dict(self):
        return asdict(self)


def moment(eta, x):
    """int_0^inf eta(t)^2 t^{1+x} dt."""
    x = float(x)

    def integrand(s):
        # log form: eta^2 and t^{2+x} may under/overflow separately
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            a = np.abs(eta(np.exp(s)))
            out = np.exp(2.0 * np.log(a) + s * (2.0 + x))
        return np.where(a == 0.0, 0.0, out)

    return integrate_log(integrand, *eta.log_window)[0]


def grad_moment(eta):
    """int_0^inf eta'(t)^2 t dt, which equals int (t eta'(t))^2 ds."""

    def integrand(s):
        with np.errstate(over="ignore", invalid="ignore"):
            t = np.exp(s)
            out = (t * eta.deriv(t)) ** 2
        return np.where(np.isfinite(out), out, 0.0)

    epsrel = 1e-13 if eta.derivative is not None else FD_QUAD_RTOL
    return integrate_log(integrand, *eta.log_window, epsabs=1e-11, epsrel=epsrel)[0]


def completeness_check(eta, f_value):
    """int_0^inf eta(t/f)^2 dt/t; equals 1 for every f > 0 under the first normalization."""
    if not f_value > 0:
        raise ValueError("f_value must be positive")
    shift = math.log(f_value)
    lo, hi = eta.log_window

    def integrand(s):
        return eta(np.exp(s) / f_value) ** 2

    return integrate_log(integrand, lo + shift, hi + shift)[0]


def normalization_defects(eta):
    """Deviations of the two normalization integrals from 1."""
    return moment(eta, -2.0) - 1.0, moment(eta, 0.0) - 1.0


def check_normalized(eta, tol=NORM_TOL_CONSTRUCTOR):
    dlog, dlin = normalization_defects(eta)
    if abs(dlog) > tol or abs(dlin) > tol:
        raise NormalizationViolated(
            f"profile {eta.name!r}: int eta^2 dt/t - 1 = {dlog:.3e}, "
            f"int eta^2 t dt - 1 = {dlin:.3e} (tol {tol:g})"
        )
    return eta


def make_profile(evaluator, support, derivative=None, name="custom", check=True):
    eta = EtaProfile(evaluator=evaluator, support=tuple(support), derivative=derivative, name=name)
    if check:
        check_normalized(eta)
    return eta


def gaussian_log_profile(params):
    """eta(t) = (pi eps)^{-1/4} exp(-(eps/2 + ln t)^2 / (2 eps))."""
    if not isinstance(params, GaussianLogParams):
        params = GaussianLogParams(float(params))
    eps = params.epsilon
    amp = (math.pi * eps) ** -0.25

    def evaluator(t):
        return amp * np.exp(-((eps / 2 + np.log(t)) ** 2) / (2 * eps))

    def derivative(t):
        return evaluator(t) * (-(eps / 2 + np.log(t)) / (eps * t))

    half = 10.0 * math.sqrt(eps)
    support = (math.exp(-eps / 2 - half), math.exp(-eps / 2 + half))
    return make_profile(evaluator, support, derivative, name=f"gaussian_log(eps={eps:g})")


def gaussian_log_moment(epsilon, x):
    """Closed form of moment() for the Gaussian-log profile."""
    return math.exp(epsilon * x * (2.0 + x) / 4.0)


def gaussian_log_grad_moment(epsilon):
    return 1.0 / (2.0 * epsilon)


def from_log_shape(shape, s_window, shape_deriv=None, name="log_shape"):
    """Admissible profile eta(t) = c * shape(ln t - s0) from any decaying shape in s.

    With A = int shape^2 ds and B = int shape^2 e^{2s} ds, the choice c = A^{-1/2},
    s0 = ln(A/B)/2 meets both normalization conditions.
    """
    lo, hi = s_window

    def weighted_integrand(s):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            a = np.abs(shape(s))
            out = np.exp(2.0 * np.log(a) + 2.0 * s)
        return np.where(a == 0.0, 0.0, out)

    area = integrate_log(lambda s: shape(s) ** 2, lo, hi)[0]
    weighted = integrate_log(weighted_integrand, lo, hi)[0]
    if not (0 < area < math.inf and 0 < weighted < math.inf):
        raise ValueError("shape^2 and shape^2 e^{2s} must both be integrable and nonzero")
    s0 = 0.5 * math.log(area / weighted)
    c = area**-0.5

    def evaluator(t):
        return c * shape(np.log(t) - s0)

    derivative = None
    if shape_deriv is not None:
        def derivative(t):
            return c * shape_deriv(np.log(t) - s0) / t

    return make_profile(evaluator, (math.exp(lo + s0), math.exp(hi + s0)), derivative, name=name)


def dilate(eta, c):
    """t -> eta(t/c); keeps int eta^2 dt/t and the gradient integral, rescales the rest."""
    lo, hi = eta.support
    deriv = None
    if eta.derivative is not None:
        def deriv(t):
            return eta.derivative(t / c) / c
    return EtaProfile(lambda t: eta.evaluator(t / c), (lo * c, hi * c), deriv, f"{eta.name}/dilated({c:g})")


def moment_table(eta, d):
    return MomentTable(
        d=d,
        m_norm_log=moment(eta, -2.0),
        m_norm_lin=moment(eta, 0.0),
        m_top=moment(eta, d),
        m_grad=grad_moment(eta),
    )


def objective_from_moments(m_top, m_grad, d):
    return m_top ** (-2.0 / d) / (1.0 + 4.0 / d**2 * m_grad)


def rd_objective(eta, d):
    """The quantity whose supremum over admissible eta is R_d."""
    check_normalized(eta, NORM_TOL_OBJECTIVE)
    return objective_from_moments(moment(eta, d), grad_moment(eta), d)


def trial_objective(epsilon, d):
    """rd_objective of the Gaussian-log profile, in closed form."""
    return math.exp(-epsilon * (d + 2) / 2.0) / (1.0 + 2.0 / (d * d * epsilon))


def trial_bound_closed_form(d):
    """Maximum of trial_objective over epsilon, solved analytically."""
    root = math.sqrt(1.0 + 2.0 * d * d / (1.0 + d / 2.0))
    return (root - 1.0) / (root + 1.0) * math.exp(-(1.0 + d / 2.0) / d**2 * (root - 1.0))


def trial_epsilon_closed_form(d):
    return (math.sqrt(1.0 + 2.0 * d * d / (1.0 + d / 2.0)) - 1.0) / d**2


def optimize_trial_epsilon(d, log_bracket=(-20.0, 5.0), rtol=1e-10):
    """Best Gaussian-log width for dimension d, by golden-section search in ln eps.

    Returns (epsilon_star, bound).
    """
    if not d >= 1:
        raise ValueError("d must be >= 1")
    log_eps, _ = golden_section_max(lambda u: trial_objective(math.exp(u), d), *log_bracket, rtol=rtol)
    eps = math.exp(log_eps)
    return eps, trial_objective(eps, d)

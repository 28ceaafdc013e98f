"""Lieb-Thirring type constants and numerical checks of kinetic energy inequalities."""

from .constants import airy_first_zero, exact_R1, exact_R2, rumin_ratio, thomas_fermi_constant
from .eta_profiles import (
    EtaProfile,
    GaussianLogParams,
    MomentTable,
    from_log_shape,
    gaussian_log_profile,
    grad_moment,
    moment,
    optimize_trial_epsilon,
    rd_objective,
)
from .radial_spectral import GroundStateResult, SpectralProblem, ground_state_energy, scaling_check
from .rd_solver import RdResult, infimum_identity_check, rd_from_ed, rd_value, rd_variational

__version__ = "0.1.0"

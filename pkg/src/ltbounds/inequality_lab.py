"""Kinetic-energy inequalities checked on torus-discretized density matrices.

Density matrices are kept in factored form gamma = Phi diag(w) Phi^*, with the
columns of Phi orthonormal in l^2 of the grid. Position-basis kernels are related to
continuum quantities by rho_i = gamma_ii / dx^d. Kinetic energies are diagonal in
the discrete Fourier basis with momenta p in (2 pi / L) {-n/2, ..., n/2 - 1}^d.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .constants import check_dimension, thomas_fermi_constant
from .errors import ConsistencyError, NoModesSelected, PauliViolation, ProfileNotLocalized
from .eta_profiles import gaussian_log_profile, moment_table, objective_from_moments

MAX_GRID_POINTS = 2**20
DENSE_GAMMA_LIMIT = 4096
PAULI_TOL = 1e-10
HERMITIAN_TOL = 1e-12
RHO_FLOOR = 1e-14
TOL_FLOOR = 1e-9
EPS_FORM_TOL = 1e-8


@dataclass(frozen=True)
class TorusGrid:
    d: int
    L: float
    n: int

    def __post_init__(self):
        check_dimension(self.d)
        if not self.L > 0:
            raise ValueError("box length must be positive")
        if int(self.n) != self.n or self.n < 2 or self.n % 2:
            raise ValueError("n must be an even integer >= 2")
        if self.n**self.d > MAX_GRID_POINTS:
            raise ValueError(f"grid has {self.n ** self.d} points, above the {MAX_GRID_POINTS} budget")

    @property
    def dx(self):
        return self.L / self.n

    @property
    def size(self):
        return self.n**self.d

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def cell_volume(self):
        return self.dx**self.d

    def coordinates(self):
        """Arrays of shape grid.shape, one per axis, on [-L/2, L/2)."""
        x = -self.L / 2 + self.dx * np.arange(self.n)
        return np.meshgrid(*([x] * self.d), indexing="ij")

    def momentum_squared(self):
        """|p|^2 on the grid in numpy FFT ordering."""
        k = 2 * np.pi / self.L * np.fft.fftfreq(self.n, d=1.0 / self.n)
        axes = np.meshgrid(*([k] * self.d), indexing="ij")
        return sum(a * a for a in axes)

    def coarsened(self):
        return TorusGrid(self.d, self.L, self.n // 2)


@dataclass(frozen=True)
class DensityInstance:
    grid: TorusGrid
    orbitals: np.ndarray = field(repr=False)  # (grid.size, rank), orthonormal columns
    weights: np.ndarray = field(repr=False)
    construction_tag: str
    params: dict = field(default_factory=dict)

    @property
    def rank(self):
        return self.weights.size

    @property
    def rho(self):
        """Density on the grid, shape grid.shape."""
        if self.rank == 0:
            return np.zeros(self.grid.shape)
        occ = (np.abs(self.orbitals) ** 2) @ self.weights
        return (occ / self.grid.cell_volume).reshape(self.grid.shape)

    @property
    def gamma(self):
        if self.grid.size > DENSE_GAMMA_LIMIT:
            raise MemoryError("dense gamma requested on a grid above the dense limit")
        return (self.orbitals * self.weights) @ self.orbitals.conj().T

    def particle_number(self):
        return float(np.sum(self.weights))

    def occupation_spectrum(self):
        """Nonzero eigenvalues of gamma; exact when the orbitals are orthonormal."""
        return np.sort(self.weights)

    def validate(self):
        gram = self.orbitals.conj().T @ self.orbitals
        if self.rank and np.max(np.abs(gram - np.eye(self.rank))) > 1e-10:
            raise PauliViolation("orbitals are not orthonormal; spectrum of gamma is not the weights")
        if self.rank and (self.weights.min() < -PAULI_TOL or self.weights.max() > 1 + PAULI_TOL):
            raise PauliViolation(
                f"occupations in [{self.weights.min():.3e}, {self.weights.max():.3e}] violate 0 <= gamma <= 1"
            )
        return self

    @classmethod
    def from_gamma(cls, grid, gamma, tag="mixture", params=None):
        """Factor a dense Hermitian kernel; rejects non-Hermitian input and Pauli violations."""
        gamma = np.asarray(gamma, dtype=complex)
        if gamma.shape != (grid.size, grid.size):
            raise ValueError("gamma shape does not match the grid")
        if np.max(np.abs(gamma - gamma.conj().T)) > HERMITIAN_TOL:
            raise ValueError("gamma is not Hermitian")
        w, v = np.linalg.eigh(0.5 * (gamma + gamma.conj().T))
        if w.size and (w.min() < -PAULI_TOL or w.max() > 1 + PAULI_TOL):
            raise PauliViolation(f"gamma eigenvalues in [{w.min():.3e}, {w.max():.3e}]")
        keep = np.abs(w) > 1e-14
        return cls(grid, v[:, keep], np.clip(w[keep], 0.0, 1.0), tag, dict(params or {}))


def _fourier_coefficients(inst):
    """Unitary DFT of each orbital, shape (rank, *grid.shape)."""
    g = inst.grid
    phi = inst.orbitals.T.reshape((inst.rank,) + g.shape)
    axes = tuple(range(1, g.d + 1))
    return np.fft.fftn(phi, axes=axes, norm="ortho")


def kinetic_energy(inst):
    """Tr(-Delta) gamma = sum_p |p|^2 <p|gamma|p>."""
    if inst.rank == 0:
        return 0.0
    p2 = inst.grid.momentum_squared()
    coeff = _fourier_coefficients(inst)
    diag = np.tensordot(inst.weights, np.abs(coeff) ** 2, axes=(0, 0))
    return float(np.sum(p2 * diag))


def tf_integral(rho, grid):
    return float(np.sum(rho ** (1.0 + 2.0 / grid.d)) * grid.cell_volume)


def sqrt_density_gradient(rho, grid):
    """int |grad sqrt(rho)|^2 with the spectral gradient (Parseval form)."""
    peak = float(np.max(rho)) if rho.size else 0.0
    if peak <= 0.0:
        return 0.0
    f = np.sqrt(np.maximum(rho, RHO_FLOOR * peak))
    fhat = np.fft.fftn(f)
    return float(np.sum(grid.momentum_squared() * np.abs(fhat) ** 2) * grid.cell_volume / grid.size)


# ---- constructors -------------------------------------------------------------------


def _plane_wave_orbitals(grid, modes):
    coords = grid.coordinates()
    cols = []
    for m in modes:
        phase = sum(2 * np.pi / grid.L * k * x for k, x in zip(m, coords))
        cols.append(np.exp(1j * phase).ravel() / math.sqrt(grid.size))
    return np.array(cols).T


def _integer_modes(grid):
    k = np.fft.fftfreq(grid.n, d=1.0 / grid.n).astype(int)
    axes = np.meshgrid(*([k] * grid.d), indexing="ij")
    return np.stack([a.ravel() for a in axes], axis=1)


def build_fermi_projector(grid, mu):
    """Projector onto plane waves with |p| <= mu."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    nyquist = math.pi * grid.n / grid.L
    if mu >= nyquist:
        # the Fermi ball would be cut off by the grid rather than by mu
        raise ValueError(f"mu = {mu} reaches the grid Nyquist momentum {nyquist:.6g}; refine n")
    modes = _integer_modes(grid)
    p = 2 * np.pi / grid.L * np.linalg.norm(modes, axis=1)
    chosen = modes[p <= mu * (1 + 1e-12)]
    if len(chosen) == 0:
        raise NoModesSelected(f"no Fourier mode with |p| <= {mu} on this grid")
    # canonical mode order keeps the instance deterministic
    chosen = sorted(map(tuple, chosen.tolist()))
    return DensityInstance(grid, _plane_wave_orbitals(grid, chosen), np.ones(len(chosen)),
                           "fermi_projector", {"mu": mu})


def _profile_values(name, r2, coords, params):
    if name == "gaussian":
        return np.exp(-params.get("alpha", 0.5) * r2)
    if name == "sech":
        return 1.0 / np.cosh(params.get("kappa", 1.0) * np.sqrt(r2))
    if name == "double_gaussian":
        a = params.get("alpha", 1.0)
        sep = params.get("separation", 2.0)
        x0 = coords[0]
        shift = r2 - x0 * x0
        return np.exp(-a * ((x0 - sep / 2) ** 2 + shift)) + np.exp(-a * ((x0 + sep / 2) ** 2 + shift))
    raise ValueError(f"unknown profile {name!r}")


PROFILES = ("gaussian", "sech", "double_gaussian")


def build_rank_one(grid, profile="gaussian", center=None, **params):
    """gamma = |phi><phi| for a real nonnegative profile, normalized on the grid."""
    center = np.zeros(grid.d) if center is None else np.asarray(center, dtype=float)
    coords = grid.coordinates()
    # minimum-image displacement from the center
    rel = [((x - c + grid.L / 2) % grid.L) - grid.L / 2 for x, c in zip(coords, center)]
    r2 = sum(r * r for r in rel)
    phi = _profile_values(profile, r2, rel, params)

    # value one half box length from the center, along the first axis
    edge_coords = [np.array([grid.L / 2])] + [np.zeros(1)] * (grid.d - 1)
    edge_val = float(_profile_values(profile, np.array([grid.L**2 / 4]), edge_coords, params)[0])
    peak = float(np.max(phi))
    if edge_val > 1e-12 * peak:
        raise ProfileNotLocalized(f"{profile} profile is {edge_val / peak:.2e} of its peak at distance L/2")

    vec = phi.ravel().astype(complex)
    vec /= np.linalg.norm(vec)
    meta = {"profile": profile, "center": center.tolist(), **params}
    return DensityInstance(grid, vec[:, None], np.ones(1), "rank_one", meta)


def build_mixture(grid, seed, rank):
    """sum_k w_k |phi_k><phi_k| with random band-limited orthonormal phi_k, w_k ~ U[0, 1]."""
    if rank < 1 or rank > grid.size:
        raise ValueError("rank must lie in 1..n^d")
    rng = np.random.default_rng(seed)
    modes = _integer_modes(grid)
    kmag = np.linalg.norm(modes, axis=1)
    k_cut = grid.n / 4
    band = np.flatnonzero(kmag <= k_cut)
    if rank > band.size:
        raise ValueError(f"rank {rank} exceeds the {band.size} band-limited modes")
    # smooth envelope inside the band so orbitals are not dominated by the band edge
    env = np.exp(-((kmag[band] / (0.5 * k_cut)) ** 2))
    coeff = (rng.standard_normal((band.size, rank)) + 1j * rng.standard_normal((band.size, rank))) * env[:, None]
    q, _ = np.linalg.qr(coeff)
    full = np.zeros((grid.size, rank), dtype=complex)
    full[band] = q
    # coefficients are in FFT order; unitary inverse DFT keeps orthonormality
    spectrum = full.T.reshape((rank,) + grid.shape)
    phi = np.fft.ifftn(spectrum, axes=tuple(range(1, grid.d + 1)), norm="ortho")
    orbitals = phi.reshape(rank, grid.size).T
    weights = rng.uniform(0.0, 1.0, size=rank)
    return DensityInstance(grid, orbitals, weights, "mixture", {"seed": seed, "rank": rank})


def zero_instance(grid):
    return DensityInstance(grid, np.zeros((grid.size, 0), dtype=complex), np.zeros(0), "mixture", {"rank": 0})


# ---- evaluation ---------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    kinetic: float
    tf_term: float
    grad_term: float
    surplus_main: float
    surplus_corollary: float
    surplus_h2o: float
    eta_used: object
    tol_grid: float
    rd_used: float
    semiclassical_ratio: Optional[float]

    def passes(self):
        return min(self.surplus_main, self.surplus_corollary, self.surplus_h2o) >= -self.tol_grid

    def to_dict(self):
        out = asdict(self)
        out["eta_used"] = self.eta_used.to_dict()
        out["passes"] = self.passes()
        return out


def _density_functionals(inst):
    rho = inst.rho
    tf = tf_integral(rho, inst.grid)
    grad = sqrt_density_gradient(rho, inst.grid)
    coarse_grid = inst.grid.coarsened()
    coarse = rho[(slice(None, None, 2),) * inst.grid.d]
    return tf, grad, tf_integral(coarse, coarse_grid), sqrt_density_gradient(coarse, coarse_grid)


def _default_rd(d):
    from .rd_solver import rd_value

    return rd_value(d).value_closed


def evaluate_main_inequality(inst, eta, rd=None):
    """LHS - RHS of the gradient-corrected bound, its gradient-free corollary, and the
    Hoffmann-Ostenhof bound, with a grid tolerance from a probe at n/2."""
    inst.validate()
    d = inst.grid.d
    c_tf = thomas_fermi_constant(d)
    table = moment_table(eta, d)
    rd = _default_rd(d) if rd is None else rd

    kin = kinetic_energy(inst)
    tf, grad, tf_c, grad_c = _density_functionals(inst)
    tf_coef = c_tf / table.m_top ** (2.0 / d)
    grad_coef = 4.0 / d**2 * table.m_grad

    surplus_main = kin - (tf_coef * tf - grad_coef * grad)
    surplus_cor = kin - c_tf * rd * tf
    surplus_h2o = kin - grad
    probe = max(
        tf_coef * abs(tf - tf_c) + grad_coef * abs(grad - grad_c),
        c_tf * rd * abs(tf - tf_c),
        abs(grad - grad_c),
    )
    ratio = kin / (c_tf * tf) if tf > 0 else None
    return InequalityReport(
        kinetic=kin,
        tf_term=tf,
        grad_term=grad,
        surplus_main=surplus_main,
        surplus_corollary=surplus_cor,
        surplus_h2o=surplus_h2o,
        eta_used=table,
        tol_grid=max(TOL_FLOOR, probe),
        rd_used=rd,
        semiclassical_ratio=ratio,
    )


def epsilon_form_check(inst, epsilon):
    """Surplus of the bound specialised to the Gaussian-log profile, using the closed-form
    moments. Cross-checked against evaluate_main_inequality with quadrature moments."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    d = inst.grid.d
    kin = kinetic_energy(inst)
    tf, grad, _, _ = _density_functionals(inst)
    value = kin - thomas_fermi_constant(d) * math.exp(-epsilon * (1 + d / 2)) * tf + 2.0 / (d * d * epsilon) * grad
    rep = evaluate_main_inequality(inst, gaussian_log_profile(epsilon), rd=0.0)
    if abs(rep.surplus_main - value) > EPS_FORM_TOL * max(1.0, abs(value)):
        raise ConsistencyError(f"closed-form surplus {value!r} vs quadrature surplus {rep.surplus_main!r}")
    return value


def main_bound_coefficient(eta, d):
    """(C_TF / m_top^{2/d}, (4/d^2) m_grad) for a profile: the two coefficients of the bound."""
    t = moment_table(eta, d)
    return thomas_fermi_constant(d) / t.m_top ** (2.0 / d), 4.0 / d**2 * t.m_grad


def corollary_constant(eta, d):
    t = moment_table(eta, d)
    return objective_from_moments(t.m_top, t.m_grad, d)


# ---- standard battery ---------------------------------------------------------------

BATTERY_EPSILONS = (0.1, 0.3, 1.0)


def standard_battery(dims=(1, 2)):
    """(label, instance) pairs: rank-one profiles, Fermi projectors, seeded mixtures."""
    out = []
    rank_one_grids = {1: TorusGrid(1, 30.0, 256), 2: TorusGrid(2, 16.0, 64)}
    fermi_grids = {1: TorusGrid(1, 2 * np.pi, 64), 2: TorusGrid(2, 2 * np.pi, 32)}
    rank_one_specs = [
        ("gaussian", {"alpha": 0.5}),
        ("gaussian", {"alpha": 1.5, "center": (1.0,)}),
        ("double_gaussian", {"alpha": 1.0, "separation": 3.0}),
    ]
    for d in dims:
        g = rank_one_grids[d]
        for name, params in rank_one_specs:
            params = dict(params)
            if "center" in params:
                params["center"] = tuple(params["center"]) + (0.0,) * (d - 1)
            label = f"rank_one/{name}/d{d}/" + ",".join(f"{k}={v}" for k, v in params.items())
            out.append((label, build_rank_one(g, name, **params)))
        for mu in (1.5, 5.5, 10.5):
            out.append((f"fermi/d{d}/mu={mu}", build_fermi_projector(fermi_grids[d], mu)))
    if 1 in dims:
        g = TorusGrid(1, 20.0, 128)
        for seed in range(10):
            out.append((f"mixture/d1/seed={seed}", build_mixture(g, seed, 5)))
    return out


def run_battery(instances, epsilons=BATTERY_EPSILONS):
    """Evaluate every instance against each Gaussian-log profile. Returns a list of rows."""
    rows = []
    for label, inst in instances:
        for eps in epsilons:
            rep = evaluate_main_inequality(inst, gaussian_log_profile(eps))
            rows.append({"instance": label, "d": inst.grid.d, "epsilon": eps,
                         "construction": inst.construction_tag, **rep.to_dict()})
    return rows

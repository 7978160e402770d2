import dataclasses
from logging import getLogger

import numpy as np
import xarray as xr

from .constants import DEFAULT_GRID_DENSITY
from .errors import DomainError
from .grid import TimeGrid
from .processes import ProcessSpec, SeededRng, beta, phase_samples
from .states import (BellMixture, BlochDiagonal, EnvTopology, TwoQubitDensity, c_to_a, negativity_bell_mixture,
                     x_matrix)
from .typing import Times, Union

logger = getLogger(__name__)

# sign of sigma_z on each qubit for the basis states |00>, |01>, |10>, |11>
SIGMA_Z_SIGNS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)

MIN_MC_SAMPLES = 100


@dataclasses.dataclass(frozen=True)
class EvolutionParams:
    """Parameters of the dephasing evolution under :math:`[\\omega_0 + \\lambda B_i(t)] \\sigma_z` on each qubit.

    Attributes:
        spec: Noise process
        env: Environment topology
        lam: Coupling :math:`\\lambda \\geq 0` (zero decouples the noise)
        omega0: Qubit frequency :math:`\\omega_0 \\geq 0`
    """
    spec: ProcessSpec
    env: EnvTopology = EnvTopology.INDEPENDENT
    lam: float = 1.0
    omega0: float = 1.0

    def __post_init__(self):
        if np.isnan(self.lam) or self.lam < 0:
            raise DomainError(f'Require lam >= 0 but got {self.lam}')
        if np.isnan(self.omega0) or self.omega0 < 0:
            raise DomainError(f'Require omega0 >= 0 but got {self.omega0}')


def dephasing_factor(p: EvolutionParams, t: Times) -> Times:
    """Damping of the coherences, :math:`e^{-4\\lambda^2\\beta(t)}` (independent) or :math:`e^{-8\\lambda^2\\beta(t)}`
    (common), equal to one at :math:`t = 0`"""
    x = np.exp(-p.env.exponent(p.lam) * np.asarray(beta(p.spec, t)))
    return float(x) if x.ndim == 0 else x


def evolve(m: BellMixture, p: EvolutionParams, t: float) -> TwoQubitDensity:
    """Noise-averaged density matrix at time :code:`t` (a pure dephasing map).

    The :code:`|00><11|` coherence picks up :math:`x e^{-4 i \\omega_0 t}`; the :code:`|01><10|` coherence is
    damped by :math:`x` for independent environments and left untouched by a common one.

    Args:
        m: Initial Bell mixture
        p: Evolution parameters
        t: Time

    Returns:
        The density matrix

    """
    x = dephasing_factor(p, t)
    inner = x if p.env == EnvTopology.INDEPENDENT else 1.0
    return TwoQubitDensity(x_matrix(m, outer=x * np.exp(-4j * p.omega0 * t), inner=inner))


def _bloch_components(a: np.ndarray, env: EnvTopology, x: Times):
    a1, a2, a3 = a
    x = np.asarray(x, dtype=float)
    if env == EnvTopology.INDEPENDENT:
        return a1 * x, a2 * x, a3 * np.ones_like(x)
    return (((a1 - a2) * x + a1 + a2) / 2,
            ((a2 - a1) * x + a1 + a2) / 2,
            a3 * np.ones_like(x))


def evolve_bloch(b: BlochDiagonal, p: EvolutionParams, t: float) -> BlochDiagonal:
    """Bloch coefficients of the evolved state in the frame rotating with :math:`\\omega_0` (:math:`a_3` is
    conserved)

    Args:
        b: Initial Bloch coefficients
        p: Evolution parameters
        t: Time

    Returns:
        The evolved coefficients

    """
    if t == 0:
        return b
    return BlochDiagonal(*(float(v) for v in _bloch_components(b.a, p.env, dephasing_factor(p, t))))


def negativity_at(m: BellMixture, p: EvolutionParams, t: Times) -> Times:
    """Negativity of the evolved state, which does not depend on :math:`\\omega_0`

    Args:
        m: Initial Bell mixture
        p: Evolution parameters
        t: Time(s)

    Returns:
        Negativity (same shape as :code:`t`), non-increasing in time

    """
    # an underflowing factor is the t -> infinity limit of the same formula
    x = np.maximum(dephasing_factor(p, t), np.finfo(float).tiny)
    return negativity_bell_mixture(m, x, p.env)


def negativity_curve(m: BellMixture, p: EvolutionParams, times: np.ndarray) -> np.ndarray:
    return np.atleast_1d(negativity_at(m, p, np.asarray(times, dtype=float)))


def mc_evolve(m: BellMixture, p: EvolutionParams, t: float, n_samples: int,
              grid_density: int = DEFAULT_GRID_DENSITY, rng: SeededRng = SeededRng(),
              workers: int = 1) -> TwoQubitDensity:
    """Monte Carlo average of :math:`U(t) \\rho_0 U^\\dagger(t)` over noise realizations.

    Each realization applies :math:`e^{-i \\theta_1 \\sigma_z} \\otimes e^{-i \\theta_2 \\sigma_z}` with
    :math:`\\theta_j = \\omega_0 t + \\lambda \\varphi_j(t)`; the phases are independent draws for independent
    environments and a single shared draw for a common one. Realization :code:`i` uses the sub-stream
    :code:`(seed, i)`, so the average is identical for any number of workers.

    Args:
        m: Initial Bell mixture
        p: Evolution parameters
        t: Time
        n_samples: Number of realizations :math:`M \\geq 100`
        grid_density: Phase-integration nodes per unit time
        rng: Seeded source of deviates
        workers: Number of threads

    Returns:
        The averaged density matrix

    """
    if n_samples < MIN_MC_SAMPLES:
        raise DomainError(f'Require n_samples >= {MIN_MC_SAMPLES} but got {n_samples}')
    n_phases = 2 if p.env == EnvTopology.INDEPENDENT else 1
    phi = phase_samples(p.spec, t, n_samples, n_phases, grid_density, rng, workers)
    theta = p.omega0 * t + p.lam * np.broadcast_to(phi, (n_samples, 2))
    # total sigma_z phase of each basis state, shape (n_samples, 4)
    total = theta @ SIGMA_Z_SIGNS.T
    factors = np.mean(np.exp(-1j * (total[:, :, np.newaxis] - total[:, np.newaxis, :])), axis=0)
    logger.debug(f'Averaged {n_samples} realizations of {p.spec.label} ({p.env.value}) at t={t}')
    return TwoQubitDensity(x_matrix(m) * factors)


def trajectory(m: BellMixture, p: EvolutionParams, grid: Union[TimeGrid, np.ndarray]) -> xr.Dataset:
    """Bloch coefficients and negativity along a time grid

    Args:
        m: Initial Bell mixture
        p: Evolution parameters
        grid: Time grid (or explicit array of times)

    Returns:
        Dataset with coordinate :code:`t` and variables :code:`a1, a2, a3, negativity`

    """
    t = grid.pos if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=float)
    a1, a2, a3 = _bloch_components(c_to_a(m).a, p.env, dephasing_factor(p, t))
    return xr.Dataset(
        data_vars={
            'a1': ('t', a1),
            'a2': ('t', a2),
            'a3': ('t', a3),
            'negativity': ('t', negativity_curve(m, p, t))
        },
        coords={'t': t}
    )

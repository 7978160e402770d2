import dataclasses
from enum import Enum
from functools import lru_cache
from logging import getLogger
from multiprocessing.pool import ThreadPool

import numpy as np
from scipy.signal import lfilter

from .constants import CHOLESKY_JITTER, DEFAULT_GRID_DENSITY, DEFAULT_SEED
from .errors import DomainError, UnsupportedProcessError, CovarianceError
from .grid import TimeGrid
from .numerics import find_root, Tolerance
from .typing import Optional, Times, Union, Tuple

logger = getLogger(__name__)

# number of Monte Carlo paths handled per task, fixed so that results do not depend on the worker count
PATH_CHUNK = 256


class ProcessKind(Enum):
    OU = 'ou'
    FGN = 'fgn'
    WIENER = 'wiener'
    WHITE = 'white'


@dataclasses.dataclass(frozen=True)
class ProcessSpec:
    """A Gaussian noise process :math:`B(t)` driving the qubit splitting.

    Attributes:
        kind: Process family
        gamma: Inverse correlation time :math:`\\gamma > 0` (Ornstein-Uhlenbeck only)
        hurst: Hurst parameter :math:`0 < H < 1` (fractional noise only)
    """
    kind: ProcessKind
    gamma: Optional[float] = None
    hurst: Optional[float] = None

    def __post_init__(self):
        if self.kind == ProcessKind.OU:
            if self.gamma is None or not self.gamma > 0 or not np.isfinite(self.gamma):
                raise DomainError(f'Require gamma > 0 for the OU process but got {self.gamma}')
        elif self.gamma is not None:
            raise DomainError(f'gamma only applies to the OU process, got gamma={self.gamma} for {self.kind.value}')
        if self.kind == ProcessKind.FGN:
            if self.hurst is None or not 0 < self.hurst < 1:
                raise DomainError(f'Require 0 < H < 1 for fractional noise but got {self.hurst}')
        elif self.hurst is not None:
            raise DomainError(f'H only applies to fractional noise, got H={self.hurst} for {self.kind.value}')

    @classmethod
    def ou(cls, gamma: float) -> "ProcessSpec":
        return cls(ProcessKind.OU, gamma=gamma)

    @classmethod
    def fgn(cls, hurst: float) -> "ProcessSpec":
        return cls(ProcessKind.FGN, hurst=hurst)

    @classmethod
    def wiener(cls) -> "ProcessSpec":
        return cls(ProcessKind.WIENER)

    @classmethod
    def white(cls) -> "ProcessSpec":
        return cls(ProcessKind.WHITE)

    @property
    def effective_hurst(self) -> Optional[float]:
        """Hurst parameter of the fractional family, with the Wiener process at :math:`H = 1/2`"""
        return 0.5 if self.kind == ProcessKind.WIENER else self.hurst

    @property
    def is_fractional(self) -> bool:
        return self.kind in (ProcessKind.FGN, ProcessKind.WIENER)

    @property
    def label(self) -> str:
        if self.kind == ProcessKind.OU:
            return f'ou:gamma={self.gamma:g}'
        if self.kind == ProcessKind.FGN:
            return f'fgn:h={self.hurst:g}'
        return self.kind.value


@dataclasses.dataclass(frozen=True)
class SeededRng:
    """Source of reproducible standard normal deviates.

    Sub-streams are keyed by integers (e.g. a path index) so that every path draws the same numbers no matter
    how the paths are split among workers.

    Attributes:
        seed: 64-bit seed
    """
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f'Require 0 <= seed < 2**64 but got {self.seed}')

    def generator(self, *key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=tuple(key)))

    def standard_normal(self, size: Union[int, Tuple[int, ...]], *key: int) -> np.ndarray:
        return self.generator(*key).standard_normal(size)


def _check_times(*times: Times):
    for t in times:
        if np.any(np.asarray(t) < 0) or np.any(np.isnan(t)):
            raise DomainError(f'Require times >= 0 but got {t}')


def _as_output(value: np.ndarray) -> Times:
    return float(value) if np.ndim(value) == 0 else value


def covariance(spec: ProcessSpec, t: Times, s: Times) -> Times:
    """Covariance kernel :math:`K(t, s) = \\mathbb{E}[B(t) B(s)]`

    Args:
        spec: Process
        t: First time(s)
        s: Second time(s), broadcast against :code:`t`

    Returns:
        :math:`(\\gamma / 2) e^{-\\gamma |t - s|}` for OU, :math:`(|t|^{2H} + |s|^{2H} - |t - s|^{2H}) / 2` for the
        fractional family

    """
    _check_times(t, s)
    if spec.kind == ProcessKind.WHITE:
        raise UnsupportedProcessError('White noise has a distributional kernel; use beta() instead')
    t_, s_ = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
    if spec.kind == ProcessKind.OU:
        k = spec.gamma / 2 * np.exp(-spec.gamma * np.abs(t_ - s_))
    else:
        h2 = 2 * spec.effective_hurst
        k = (np.abs(t_) ** h2 + np.abs(s_) ** h2 - np.abs(t_ - s_) ** h2) / 2
    return _as_output(k)


def beta(spec: ProcessSpec, t: Times) -> Times:
    """The double integral :math:`\\beta(t) = \\int_0^t \\int_0^t K(s, s') ds ds'`, the variance of the phase
    :math:`\\varphi(t) = \\int_0^t B(s) ds`.

    Args:
        spec: Process
        t: Time(s) :math:`\\geq 0`

    Returns:
        :math:`\\beta(t)`, non-decreasing with :math:`\\beta(0) = 0`

    """
    _check_times(t)
    t_ = np.asarray(t, dtype=float)
    if spec.kind == ProcessKind.OU:
        u = spec.gamma * t_
        # (e^{-u} + u - 1) / gamma, with a series where expm1 cancels
        series = u ** 2 * (1 / 2 - u / 6 + u ** 2 / 24 - u ** 3 / 120)
        b = np.where(u < 1e-3, series, np.expm1(-u) + u) / spec.gamma
    elif spec.kind == ProcessKind.WHITE:
        b = t_.copy()
    else:
        p = 2 * spec.effective_hurst + 2
        b = t_ ** p / p
    return _as_output(b)


def beta_inverse(spec: ProcessSpec, b: float, tol: Tolerance = Tolerance()) -> float:
    """Time at which :math:`\\beta` reaches a given value

    Args:
        spec: Process
        b: Target value :math:`\\geq 0`
        tol: Root-finder tolerance (OU only)

    Returns:
        :math:`t` with :math:`\\beta(t) = b`

    """
    if np.isnan(b) or b < 0:
        raise DomainError(f'Require b >= 0 but got {b}')
    if b == 0:
        return 0.0
    if np.isinf(b):
        return np.inf
    if spec.kind == ProcessKind.WHITE:
        return float(b)
    if spec.is_fractional:
        p = 2 * spec.effective_hurst + 2
        return float((p * b) ** (1 / p))
    # gamma t^2 / 2 >= beta_OU(t) >= t - 1 / gamma brackets the root; solving for t / scale keeps
    # the absolute tolerance relative to the root
    scale = np.sqrt(2 * b / spec.gamma)
    s = find_root(lambda s: beta(spec, s * scale) - b, 1.0, (b + 1 / spec.gamma) / scale, tol)
    return float(s * scale)


@lru_cache(maxsize=32)
def _fractional_factor(hurst: float, t_max: float, n_steps: int) -> np.ndarray:
    """Lower Cholesky factor of the covariance on the nonzero grid nodes"""
    grid = TimeGrid(t_max, n_steps)
    t = grid.pos[1:]
    h2 = 2 * hurst
    cov = (t[:, np.newaxis] ** h2 + t[np.newaxis, :] ** h2 - np.abs(t[:, np.newaxis] - t[np.newaxis, :]) ** h2) / 2
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = CHOLESKY_JITTER * np.max(np.diag(cov))
        logger.warning(f'Covariance for H={hurst} on {grid} is not numerically positive definite, '
                       f'retrying with diagonal jitter {jitter:.3g}')
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(t.size))
        except np.linalg.LinAlgError as e:
            raise CovarianceError(f'Covariance for H={hurst} on {grid} is not positive definite '
                                  f'even with jitter {jitter:.3g}') from e


def path_from_normals(spec: ProcessSpec, grid: TimeGrid, xi: np.ndarray) -> np.ndarray:
    """Map standard normal deviates to a process path on every grid node (the map is linear)

    Args:
        spec: Process (not white noise)
        grid: Time grid
        xi: Deviates of shape :code:`(..., n_steps + 1)`

    Returns:
        Path values :math:`B(t_0), \\ldots, B(t_n)` with the same shape as :code:`xi`

    """
    if spec.kind == ProcessKind.WHITE:
        raise UnsupportedProcessError('White noise has no path sampler; use sample_phase() instead')
    xi = np.asarray(xi, dtype=float)
    if not xi.shape[-1] == grid.size:
        raise DomainError(f'Require xi.shape[-1] == {grid.size} but got {xi.shape[-1]}')
    if spec.kind == ProcessKind.OU:
        # stationary start followed by the exact AR(1) transition
        a = np.exp(-spec.gamma * grid.spacing)
        b0 = np.sqrt(spec.gamma / 2) * xi[..., :1]
        noise = np.sqrt(spec.gamma / 2 * -np.expm1(-2 * spec.gamma * grid.spacing))
        rest = lfilter([noise], [1, -a], xi[..., 1:], axis=-1, zi=a * b0)[0]
        return np.concatenate((b0, rest), axis=-1)
    factor = _fractional_factor(spec.effective_hurst, grid.t_max, grid.n_steps)
    # B(0) = 0 almost surely, so xi[..., 0] is unused
    return np.concatenate((np.zeros_like(xi[..., :1]), xi[..., 1:] @ factor.T), axis=-1)


def sample_path(spec: ProcessSpec, grid: TimeGrid, rng: SeededRng, n_paths: Optional[int] = None,
                key: Tuple[int, ...] = ()) -> np.ndarray:
    """Draw paths exactly distributed with the process covariance on the grid nodes

    Args:
        spec: Process (not white noise)
        grid: Time grid
        rng: Seeded source of deviates
        n_paths: Number of paths (a single path of shape :code:`(n_steps + 1,)` if :code:`None`)
        key: Sub-stream key

    Returns:
        Array of shape :code:`(n_steps + 1,)` or :code:`(n_paths, n_steps + 1)`

    """
    size = grid.size if n_paths is None else (n_paths, grid.size)
    return path_from_normals(spec, grid, rng.standard_normal(size, *key))


def phase_from_normals(spec: ProcessSpec, grid: TimeGrid, xi: np.ndarray) -> np.ndarray:
    """Phase :math:`\\varphi(t_{max})` from deviates: trapezoid integral of the path, or a direct draw with
    variance :math:`\\beta(t) = t` for white noise (which only reads :code:`xi[..., 0]`)."""
    xi = np.asarray(xi, dtype=float)
    if spec.kind == ProcessKind.WHITE:
        return np.sqrt(grid.t_max) * xi[..., 0]
    return grid.trapezoid(path_from_normals(spec, grid, xi))


def sample_phase(spec: ProcessSpec, t: float, grid: TimeGrid, rng: SeededRng, n_paths: Optional[int] = None,
                 key: Tuple[int, ...] = ()) -> Union[float, np.ndarray]:
    """Draw the accumulated phase :math:`\\varphi(t) = \\int_0^t B(s) ds`

    Args:
        spec: Process
        t: Final time, must equal :code:`grid.t_max`
        grid: Grid spanning :code:`[0, t]`
        rng: Seeded source of deviates
        n_paths: Number of draws (scalar if :code:`None`)
        key: Sub-stream key

    Returns:
        Phase draw(s)

    """
    _check_times(t)
    if not np.isclose(grid.t_max, t, rtol=1e-12, atol=1e-12):
        raise DomainError(f'Require a grid spanning [0, {t}] but got {grid}')
    size = grid.size if n_paths is None else (n_paths, grid.size)
    phase = phase_from_normals(spec, grid, rng.standard_normal(size, *key))
    return float(phase) if n_paths is None else phase


def _phase_chunk(args) -> np.ndarray:
    spec, grid, rng, n_phases, start, stop = args
    width = 1 if spec.kind == ProcessKind.WHITE else grid.size
    xi = np.stack([rng.standard_normal((n_phases, width), i) for i in range(start, stop)])
    return phase_from_normals(spec, grid, xi)


def phase_samples(spec: ProcessSpec, t: float, n_samples: int, n_phases: int = 1,
                  grid_density: int = DEFAULT_GRID_DENSITY, rng: SeededRng = SeededRng(),
                  workers: int = 1) -> np.ndarray:
    """Independent phase draws for Monte Carlo averages, path :code:`i` using the sub-stream :code:`(seed, i)`

    Args:
        spec: Process
        t: Final time
        n_samples: Number of realizations
        n_phases: Independent phases per realization (one per environment)
        grid_density: Integration nodes per unit time
        rng: Seeded source of deviates
        workers: Number of threads; the result is identical for any value

    Returns:
        Array of shape :code:`(n_samples, n_phases)`

    """
    _check_times(t)
    if n_samples < 1:
        raise DomainError(f'Require n_samples >= 1 but got {n_samples}')
    if workers < 1:
        raise DomainError(f'Require workers >= 1 but got {workers}')
    if t == 0:
        return np.zeros((n_samples, n_phases))
    grid = TimeGrid.from_density(t, grid_density)
    tasks = [(spec, grid, rng, n_phases, start, min(start + PATH_CHUNK, n_samples))
             for start in range(0, n_samples, PATH_CHUNK)]
    logger.debug(f'Sampling {n_samples} x {n_phases} phases of {spec.label} on {grid} '
                 f'in {len(tasks)} chunks with {workers} workers')
    if workers == 1:
        chunks = [_phase_chunk(task) for task in tasks]
    else:
        with ThreadPool(workers) as pool:
            chunks = pool.map(_phase_chunk, tasks)
    return np.concatenate(chunks, axis=0)


def characteristic_function(spec: ProcessSpec, kappa: float, t: Times) -> Times:
    """Analytic :math:`\\mathbb{E}[e^{\\pm i \\kappa \\varphi(t)}] = e^{-\\kappa^2 \\beta(t) / 2}` (real)"""
    return _as_output(np.exp(-kappa ** 2 * np.asarray(beta(spec, t)) / 2))


def mc_characteristic_function(spec: ProcessSpec, kappa: float, t: float, n_samples: int,
                               grid_density: int = DEFAULT_GRID_DENSITY, rng: SeededRng = SeededRng(),
                               workers: int = 1) -> complex:
    """Empirical mean of :math:`e^{i \\kappa \\varphi(t)}` over seeded phase draws

    Args:
        spec: Process
        kappa: Constant coupling :math:`\\kappa`
        t: Time
        n_samples: Number of draws
        grid_density: Integration nodes per unit time
        rng: Seeded source of deviates
        workers: Number of threads

    Returns:
        The complex sample mean, within :math:`4 / \\sqrt{M}` of the analytic value with high probability

    """
    phases = phase_samples(spec, t, n_samples, 1, grid_density, rng, workers)[:, 0]
    return complex(np.mean(np.exp(1j * kappa * phases)))

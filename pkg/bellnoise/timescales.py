import dataclasses
from enum import Enum
from logging import getLogger
from multiprocessing.pool import ThreadPool

import numpy as np
import xarray as xr

from .constants import DEFAULT_RATIO
from .errors import DomainError, NotEntangledError
from .numerics import lambert_w0
from .processes import ProcessSpec, ProcessKind, SeededRng, beta_inverse
from .states import BellMixture, EnvTopology, initial_negativity, sample_face_mixture, sample_random_mixture
from .typing import Iterable, List, Optional, Sequence

logger = getLogger(__name__)


class Outcome(Enum):
    FINITE = 'finite'
    ASYMPTOTIC = 'asymptotic'
    NEVER = 'never'


@dataclasses.dataclass(frozen=True)
class SurvivalOutcome:
    """How (and when) the negativity reaches zero.

    Attributes:
        kind: :code:`FINITE` (sudden death at :code:`time`), :code:`ASYMPTOTIC` (zero only as
            :math:`t \\to \\infty`) or :code:`NEVER` (constant positive negativity)
        time: Survival time, infinite unless :code:`kind` is :code:`FINITE`
        critical_factor: Dephasing factor at which the negativity vanishes (:code:`FINITE` only)
    """
    kind: Outcome
    time: float = np.inf
    critical_factor: Optional[float] = None

    def __post_init__(self):
        if self.kind == Outcome.FINITE and not np.isfinite(self.time):
            raise DomainError(f'A finite outcome needs a finite time but got {self.time}')
        if self.kind != Outcome.FINITE and np.isfinite(self.time):
            raise DomainError(f'Outcome {self.kind.value} cannot have a finite time {self.time}')

    @property
    def is_finite(self) -> bool:
        return self.kind == Outcome.FINITE


def _check_ratio(r: float):
    if not 0 < r < 1:
        raise DomainError(f'Require ratio 0 < r < 1 but got {r}')


def _check_coupling(lam: float):
    if not lam > 0:
        raise DomainError(f'Require lam > 0 but got {lam}')


def beta_star(r: float = DEFAULT_RATIO) -> float:
    """:math:`\\beta^* = -\\frac14 \\log r`, the value of :math:`\\beta` at which a Bell state under independent
    environments (:math:`\\lambda = 1`) keeps the fraction :math:`r` of its negativity"""
    _check_ratio(r)
    return -np.log(r) / 4


def _critical_factor(m: BellMixture, env: EnvTopology, level: float) -> Optional[float]:
    """Dephasing factor at which the negativity drops to :code:`level` (below its initial value).

    At most one of the two coherence terms of the negativity is positive. Its value is
    :math:`\\max(0, x p - q)` with :math:`p` the coherence and :math:`q` the competing population, except that the
    :math:`|\\Psi^\\pm\\rangle` term does not depend on :math:`x` in a common environment.

    Returns:
        :math:`x_c \\in [0, 1)`, or :code:`None` if the negativity is constant

    """
    c1, c2, c3, c4 = m
    if abs(c1 - c2) > c3 + c4:
        p, q = abs(c1 - c2), c3 + c4
    elif env == EnvTopology.INDEPENDENT:
        p, q = abs(c3 - c4), c1 + c2
    else:
        return None
    return (level + q) / p


def _time_from_factor(x_c: float, spec: ProcessSpec, lam: float, env: EnvTopology) -> float:
    # x_c can round to just above one for barely entangled states
    return beta_inverse(spec, max(0.0, -np.log(x_c) / env.exponent(lam)))


def _entangled_negativity(m: BellMixture) -> float:
    n0 = initial_negativity(m)
    if not n0 > 0:
        raise NotEntangledError(f'Initial state {tuple(m)} is not entangled (N0 = {n0})')
    return n0


def preserving_time_bell(spec: ProcessSpec, lam: float = 1, r: float = DEFAULT_RATIO,
                         env: EnvTopology = EnvTopology.INDEPENDENT) -> float:
    """Closed-form entanglement-preserving time of a pure Bell state.

    With :math:`b = \\beta^* / (A \\lambda^2)`: :math:`b` for white noise,
    :math:`[(2H + 2) b]^{1 / (2H + 2)}` for fractional noise (:math:`(3b)^{1/3}` for Wiener) and
    :math:`\\frac1\\gamma [\\gamma b + W_0(-e^{-\\gamma b - 1}) + 1]` for OU.

    Args:
        spec: Process
        lam: Coupling :math:`\\lambda > 0`
        r: Fraction of the initial negativity
        env: Environment topology

    Returns:
        :math:`t^*`

    """
    _check_coupling(lam)
    b = beta_star(r) / (env.bound_constant * lam ** 2)
    if spec.kind == ProcessKind.WHITE:
        return float(b)
    if spec.kind == ProcessKind.OU:
        gb = spec.gamma * b
        return float((gb + lambert_w0(-np.exp(-gb - 1)) + 1) / spec.gamma)
    p = 2 * spec.effective_hurst + 2
    return float((p * b) ** (1 / p))


def preserving_time(m: BellMixture, spec: ProcessSpec, lam: float = 1, r: float = DEFAULT_RATIO,
                    env: EnvTopology = EnvTopology.INDEPENDENT) -> float:
    """Entanglement-preserving time :math:`t^*`, the first time the negativity falls to :math:`r N_0`

    Args:
        m: Initial Bell mixture (entangled)
        spec: Process
        lam: Coupling :math:`\\lambda > 0`
        r: Fraction of the initial negativity
        env: Environment topology

    Returns:
        :math:`t^*`, infinite if the negativity is constant

    """
    _check_ratio(r)
    _check_coupling(lam)
    n0 = _entangled_negativity(m)
    x_c = _critical_factor(m, env, r * n0)
    if x_c is None:
        return np.inf
    return _time_from_factor(x_c, spec, lam, env)


def survival_time(m: BellMixture, spec: ProcessSpec, lam: float = 1,
                  env: EnvTopology = EnvTopology.INDEPENDENT) -> SurvivalOutcome:
    """Entanglement-survival time :math:`t_{ES}`, the time at which the state becomes separable

    Args:
        m: Initial Bell mixture (entangled)
        spec: Process
        lam: Coupling :math:`\\lambda > 0`
        env: Environment topology

    Returns:
        The outcome, decided by exact case analysis of the critical dephasing factor

    """
    _check_coupling(lam)
    _entangled_negativity(m)
    x_c = _critical_factor(m, env, 0)
    if x_c is None:
        return SurvivalOutcome(Outcome.NEVER)
    if x_c == 0:
        return SurvivalOutcome(Outcome.ASYMPTOTIC)
    return SurvivalOutcome(Outcome.FINITE, _time_from_factor(x_c, spec, lam, env), x_c)


def _check_bound_args(a: int, lam: float):
    if a not in (1, 2):
        raise DomainError(f'Require A in (1, 2) but got {a}')
    _check_coupling(lam)


def tstar_bound_beta(n0: float, r: float = DEFAULT_RATIO, a: int = 1) -> float:
    """:math:`\\frac{1}{4A} \\log \\frac{N_0 + 1}{N_0 (2r - 1) + 1}`, attained by mixtures of one
    :math:`\\Phi` and one :math:`\\Psi` Bell state"""
    _check_ratio(r)
    if not 0 < n0 <= 1:
        raise DomainError(f'Require 0 < N0 <= 1 but got {n0}')
    return np.log((n0 + 1) / (n0 * (2 * r - 1) + 1)) / (4 * a)


def tstar_lower_bound(n0: float, r: float = DEFAULT_RATIO, a: int = 1, spec: ProcessSpec = ProcessSpec.white(),
                      lam: float = 1) -> float:
    """Lower bound on :math:`t^*` for any Bell mixture of initial negativity :math:`N_0`

    Args:
        n0: Initial negativity in :math:`(0, 1]`
        r: Fraction of the initial negativity
        a: :math:`A = 1` (independent) or :math:`2` (common)
        spec: Process
        lam: Coupling

    Returns:
        The bound in time

    """
    _check_bound_args(a, lam)
    return beta_inverse(spec, tstar_bound_beta(n0, r, a) / lam ** 2)


def tes_bound_beta(n0: float, a: int = 1) -> float:
    """:math:`\\frac{1}{4A} \\log \\frac{1 + N_0}{1 - N_0}`, attained on the faces of the tetrahedron"""
    if not 0 < n0 < 1:
        raise DomainError(f'Require 0 < N0 < 1 but got {n0}')
    return np.log((1 + n0) / (1 - n0)) / (4 * a)


def tes_lower_bound(n0: float, a: int = 1, spec: ProcessSpec = ProcessSpec.white(), lam: float = 1) -> float:
    """Lower bound on finite survival times for Bell mixtures of initial negativity :math:`N_0`, diverging as
    :math:`N_0 \\to 1`

    Args:
        n0: Initial negativity in :math:`(0, 1)`
        a: :math:`A = 1` (independent) or :math:`2` (common)
        spec: Process
        lam: Coupling

    Returns:
        The bound in time

    """
    _check_bound_args(a, lam)
    return beta_inverse(spec, tes_bound_beta(n0, a) / lam ** 2)


def _scatter_row(args) -> dict:
    m, spec, lam, env, r = args
    n0 = initial_negativity(m)
    a = env.bound_constant
    outcome = survival_time(m, spec, lam, env)
    return {
        'c1': m.c1, 'c2': m.c2, 'c3': m.c3, 'c4': m.c4,
        'N0': n0,
        'tstar': preserving_time(m, spec, lam, r, env),
        'tes_outcome': outcome.kind.value,
        'tes': outcome.time,
        'tstar_bound': tstar_lower_bound(n0, r, a, spec, lam),
        'tes_bound': tes_lower_bound(n0, a, spec, lam) if n0 < 1 else np.inf
    }


SCATTER_COLUMNS = ('c1', 'c2', 'c3', 'c4', 'N0', 'tstar', 'tes_outcome', 'tes', 'tstar_bound', 'tes_bound')


def scatter_study(n_states: int, spec: ProcessSpec, lam: float = 1, env: EnvTopology = EnvTopology.INDEPENDENT,
                  r: float = DEFAULT_RATIO, rng: SeededRng = SeededRng(), workers: int = 1,
                  mixtures: Optional[Sequence[BellMixture]] = None, face: Optional[int] = None) -> xr.Dataset:
    """Preserving and survival times of random entangled Bell mixtures together with their lower bounds

    Args:
        n_states: Number of states
        spec: Process
        lam: Coupling
        env: Environment topology
        r: Fraction of the initial negativity
        rng: Seeded source, state :code:`i` drawn from sub-stream :code:`(seed, i)`
        workers: Number of threads; rows do not depend on it
        mixtures: Explicit states to use instead of random draws (must have :code:`n_states` entries)
        face: Draw the states on the face :math:`c_{face} = 0` of the tetrahedron instead of the whole simplex

    Returns:
        Dataset over dimension :code:`state` with the variables of :code:`SCATTER_COLUMNS`

    """
    if n_states < 1:
        raise DomainError(f'Require n_states >= 1 but got {n_states}')
    if mixtures is None and face is None:
        mixtures = [sample_random_mixture(rng, entangled_only=True, key=(i,)) for i in range(n_states)]
    elif mixtures is None:
        mixtures = [sample_face_mixture(rng, face, entangled_only=True, key=(i,)) for i in range(n_states)]
    elif not len(mixtures) == n_states:
        raise DomainError(f'Require {n_states} mixtures but got {len(mixtures)}')
    tasks = [(m, spec, lam, env, r) for m in mixtures]
    logger.debug(f'Scatter study of {n_states} states for {spec.label} ({env.value}) with {workers} workers')
    if workers == 1:
        rows = [_scatter_row(task) for task in tasks]
    else:
        with ThreadPool(workers) as pool:
            rows = pool.map(_scatter_row, tasks)
    return xr.Dataset(
        data_vars={name: ('state', np.array([row[name] for row in rows])) for name in SCATTER_COLUMNS},
        coords={'state': np.arange(n_states)}
    )


def tstar_sweep(values: Iterable[float], family: ProcessKind, lam: float = 1, r: float = DEFAULT_RATIO,
                env: EnvTopology = EnvTopology.INDEPENDENT) -> xr.Dataset:
    """Bell-state :math:`t^*` as a function of :math:`\\gamma` (OU) or :math:`H` (fractional noise)

    Args:
        values: Parameter values
        family: :code:`ProcessKind.OU` or :code:`ProcessKind.FGN`
        lam: Coupling
        r: Fraction of the initial negativity
        env: Environment topology

    Returns:
        Dataset with coordinate :code:`param` and variable :code:`tstar`

    """
    if family == ProcessKind.OU:
        specs: List[ProcessSpec] = [ProcessSpec.ou(v) for v in values]
    elif family == ProcessKind.FGN:
        specs = [ProcessSpec.fgn(v) for v in values]
    else:
        raise DomainError(f'Sweeps are defined for the ou and fgn families but got {family.value}')
    params = np.array([s.gamma if family == ProcessKind.OU else s.hurst for s in specs])
    tstar = np.array([preserving_time_bell(s, lam, r, env) for s in specs])
    return xr.Dataset(data_vars={'tstar': ('param', tstar)}, coords={'param': params})


def bound_curves(n0_values: Iterable[float], r: float = DEFAULT_RATIO, a: int = 1,
                 spec: ProcessSpec = ProcessSpec.white(), lam: float = 1) -> xr.Dataset:
    """Lower-bound curves of :math:`t^*` and :math:`t_{ES}` against the initial negativity (the survival bound is
    infinite at :math:`N_0 = 1`)"""
    n0 = np.asarray(list(n0_values), dtype=float)
    tstar = np.array([tstar_lower_bound(n, r, a, spec, lam) for n in n0])
    tes = np.array([tes_lower_bound(n, a, spec, lam) if n < 1 else np.inf for n in n0])
    return xr.Dataset(data_vars={'tstar_bound': ('N0', tstar), 'tes_bound': ('N0', tes)}, coords={'N0': n0})

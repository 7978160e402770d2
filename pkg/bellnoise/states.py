import dataclasses
from enum import Enum
from logging import getLogger

import numpy as np

from .constants import PROB_TOL, EIG_TOL, ENTANGLED_TOL
from .errors import DomainError, TetrahedronError, DensityMatrixError
from .processes import SeededRng
from .typing import Optional, Probs4, Tuple, Union

logger = getLogger(__name__)


class EnvTopology(Enum):
    """Whether each qubit sees its own noise realization or both share one"""
    INDEPENDENT = 'indep'
    COMMON = 'common'

    @property
    def bound_constant(self) -> int:
        """The constant :math:`A` of the lower bounds (1 independent, 2 common)"""
        return 1 if self == EnvTopology.INDEPENDENT else 2

    def exponent(self, lam: float) -> float:
        """Coefficient :math:`4 A \\lambda^2` of :math:`\\beta(t)` in the dephasing exponent"""
        return 4 * self.bound_constant * lam ** 2


@dataclasses.dataclass(frozen=True)
class BellMixture:
    """Weights of the Bell projectors :math:`|\\Phi^+\\rangle, |\\Phi^-\\rangle, |\\Psi^+\\rangle, |\\Psi^-\\rangle`"""
    c1: float
    c2: float
    c3: float
    c4: float

    def __post_init__(self):
        c = self.c
        if np.any(np.isnan(c)) or np.any(c < -PROB_TOL) or not abs(c.sum() - 1) <= PROB_TOL:
            raise DomainError(f'Require c_i >= 0 and sum(c) == 1 but got {tuple(c)}')

    @classmethod
    def from_array(cls, c: Union[Probs4, np.ndarray]) -> "BellMixture":
        c = np.asarray(c, dtype=float)
        if not c.shape == (4,):
            raise DomainError(f'Require 4 weights but got shape {c.shape}')
        return cls(*(float(v) for v in c))

    @property
    def c(self) -> np.ndarray:
        return np.array((self.c1, self.c2, self.c3, self.c4))

    def __iter__(self):
        return iter((self.c1, self.c2, self.c3, self.c4))


@dataclasses.dataclass(frozen=True)
class BlochDiagonal:
    """Correlation coefficients :math:`a_i` of :math:`\\frac14 (I + \\sum_i a_i \\sigma_i \\otimes \\sigma_i)`"""
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        c = _bloch_to_weights(self.a)
        if np.any(np.isnan(c)) or np.any(c < -PROB_TOL):
            raise TetrahedronError(f'Bloch vector {tuple(self.a)} lies outside the Bell-state tetrahedron '
                                   f'(weights {tuple(c)})')

    @property
    def a(self) -> np.ndarray:
        return np.array((self.a1, self.a2, self.a3))

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))


class TwoQubitDensity:
    def __init__(self, matrix: np.ndarray, validate: bool = True):
        """Two-qubit density matrix in the basis :code:`|00>, |01>, |10>, |11>` (read-only)

        Args:
            matrix: The :code:`4 x 4` matrix
            validate: Check Hermiticity, unit trace and positivity
        """
        matrix = np.array(matrix, dtype=np.complex128)
        if not matrix.shape == (4, 4):
            raise DensityMatrixError(f'Require a 4 x 4 matrix but got shape {matrix.shape}')
        if validate:
            if not np.allclose(matrix, matrix.conj().T, rtol=0, atol=PROB_TOL):
                raise DensityMatrixError('Density matrix is not Hermitian')
            if not abs(np.trace(matrix) - 1) <= PROB_TOL:
                raise DensityMatrixError(f'Require unit trace but got {np.trace(matrix)}')
            min_eig = np.linalg.eigvalsh(matrix).min()
            if min_eig < -EIG_TOL:
                raise DensityMatrixError(f'Density matrix has negative eigenvalue {min_eig}')
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def is_x_shaped(self) -> bool:
        return np.allclose(self.matrix * ~X_MASK, 0, rtol=0, atol=PROB_TOL)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f'TwoQubitDensity({self.matrix!r})'


X_MASK = np.eye(4, dtype=bool) | np.eye(4, dtype=bool)[::-1]


def _bloch_to_weights(a: np.ndarray) -> np.ndarray:
    a1, a2, a3 = a
    return np.array((1 + a1 - a2 + a3, 1 - a1 + a2 + a3, 1 + a1 + a2 - a3, 1 - a1 - a2 - a3)) / 4


def c_to_a(m: BellMixture) -> BlochDiagonal:
    """Bloch coefficients of a Bell mixture: :math:`a_1 = c_1 - c_2 + c_3 - c_4`,
    :math:`a_2 = -c_1 + c_2 + c_3 - c_4`, :math:`a_3 = c_1 + c_2 - c_3 - c_4`"""
    c1, c2, c3, c4 = m
    return BlochDiagonal(c1 - c2 + c3 - c4, -c1 + c2 + c3 - c4, c1 + c2 - c3 - c4)


def a_to_c(b: BlochDiagonal) -> BellMixture:
    """Inverse of :code:`c_to_a` (the weights sum to one by construction)"""
    return BellMixture.from_array(_bloch_to_weights(b.a))


def x_matrix(m: BellMixture, outer: complex = 1.0, inner: complex = 1.0) -> np.ndarray:
    """The X-shaped matrix of a dephased Bell mixture

    Args:
        m: Bell mixture
        outer: Factor multiplying the :code:`|00><11|` coherence :math:`(c_1 - c_2) / 2` (conjugated on
            :code:`|11><00|`)
        inner: Factor multiplying the :code:`|01><10|` coherence :math:`(c_3 - c_4) / 2` (real)

    Returns:
        The :code:`4 x 4` complex matrix

    """
    c1, c2, c3, c4 = m
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[0, 0] = rho[3, 3] = (c1 + c2) / 2
    rho[1, 1] = rho[2, 2] = (c3 + c4) / 2
    rho[0, 3] = outer * (c1 - c2) / 2
    rho[3, 0] = np.conj(outer) * (c1 - c2) / 2
    rho[1, 2] = rho[2, 1] = inner * (c3 - c4) / 2
    return rho


def density_matrix(m: BellMixture) -> TwoQubitDensity:
    """Density matrix :math:`\\sum_i c_i |B_i\\rangle\\langle B_i| = \\frac14 (I + \\sum_i a_i \\sigma_i \\otimes \\sigma_i)`
    of a Bell mixture, which is X-shaped

    Args:
        m: Bell mixture

    Returns:
        The density matrix

    """
    return TwoQubitDensity(x_matrix(m))


def partial_transpose(rho: Union[TwoQubitDensity, np.ndarray]) -> np.ndarray:
    """Transpose over the second qubit's indices"""
    return np.asarray(rho).reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def _block_eigs(p: np.ndarray, q: np.ndarray, off: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mean, half_gap = (p + q) / 2, np.sqrt(((p - q) / 2) ** 2 + np.abs(off) ** 2)
    return mean - half_gap, mean + half_gap


def negativity(rho: Union[TwoQubitDensity, np.ndarray]) -> float:
    """Negativity :math:`N = 2 |\\sum_i \\lambda_i^-|` over the negative eigenvalues of the partial transpose.

    The partial transpose of an X-shaped matrix splits into the :code:`{|00>, |11>}` and :code:`{|01>, |10>}`
    blocks, whose eigenvalues have a closed form; anything else goes through a Hermitian eigensolver.

    Args:
        rho: Density matrix

    Returns:
        Negativity in :math:`[0, 1]`

    """
    rho = rho if isinstance(rho, TwoQubitDensity) else TwoQubitDensity(rho)
    mat = rho.matrix
    if rho.is_x_shaped:
        d = mat.diagonal().real
        eigs = np.hstack((_block_eigs(d[0], d[3], mat[1, 2]), _block_eigs(d[1], d[2], mat[0, 3])))
    else:
        logger.debug('Density matrix is not X-shaped, using the general eigensolver')
        eigs = np.linalg.eigvalsh(partial_transpose(mat))
    return float(np.clip(2 * np.abs(eigs[eigs < 0].sum()), 0, 1))


def negativity_bell_mixture(m: BellMixture, x: Union[float, np.ndarray],
                            env: EnvTopology = EnvTopology.INDEPENDENT) -> Union[float, np.ndarray]:
    """Closed-form negativity of a dephased Bell mixture as a function of the dephasing factor

    Args:
        m: Initial Bell mixture
        x: Dephasing factor(s) in :math:`(0, 1]`, i.e. :math:`e^{-4 \\lambda^2 \\beta}` (independent) or
            :math:`e^{-8 \\lambda^2 \\beta}` (common)
        env: Environment topology

    Returns:
        Negativity (same shape as :code:`x`), clamped to :math:`[0, 1]`

    """
    x_ = np.asarray(x, dtype=float)
    if np.any(np.isnan(x_)) or np.any(x_ <= 0) or np.any(x_ > 1):
        raise DomainError(f'Require dephasing factor in (0, 1] but got {x}')
    c1, c2, c3, c4 = m
    if env == EnvTopology.INDEPENDENT:
        n = (np.abs(c1 + c2 + x_ * (c3 - c4)) + np.abs(c1 + c2 - x_ * (c3 - c4)) +
             np.abs(x_ * (c1 - c2) + c3 + c4) + np.abs(-x_ * (c1 - c2) + c3 + c4)) / 2 - 1
    else:
        n = (np.abs(x_ * (c1 - c2) + c3 + c4) + np.abs(x_ * (c2 - c1) + c3 + c4) +
             np.abs(1 - 2 * c3) + np.abs(1 - 2 * c4) - 2) / 2
    n = np.clip(n, 0, 1)
    return float(n) if n.ndim == 0 else n


def initial_negativity(m: BellMixture) -> float:
    return negativity_bell_mixture(m, 1.0)


def is_separable(m: BellMixture) -> bool:
    """Membership of the separable octahedron, :math:`\\max_i c_i \\leq 1/2`"""
    return bool(m.c.max() <= 0.5)


def _draw_mixture(rng: SeededRng, entangled_only: bool, key: Tuple[int, ...], max_draws: int,
                  face: Optional[int] = None) -> BellMixture:
    gen = rng.generator(*key)
    for draw in range(1, max_draws + 1):
        e = gen.standard_exponential(4)
        if face is not None:
            e[face] = 0
        m = BellMixture.from_array(e / e.sum())
        if not entangled_only or initial_negativity(m) > ENTANGLED_TOL:
            if draw > 1000:
                logger.warning(f'Rejection sampling needed {draw} draws')
            return m
    raise DomainError(f'No entangled mixture found in {max_draws} draws')


def sample_random_mixture(rng: SeededRng, entangled_only: bool = False, key: Tuple[int, ...] = (),
                          max_draws: int = 100000) -> BellMixture:
    """Uniform draw on the probability simplex (normalized exponentials, i.e. Dirichlet(1, 1, 1, 1))

    Args:
        rng: Seeded source
        entangled_only: Reject draws whose initial negativity does not exceed :code:`ENTANGLED_TOL`
        key: Sub-stream key, so that draw :code:`i` of a study can use :code:`key=(i,)`
        max_draws: Rejection budget

    Returns:
        The mixture

    """
    return _draw_mixture(rng, entangled_only, key, max_draws)


def sample_face_mixture(rng: SeededRng, face: int, entangled_only: bool = False, key: Tuple[int, ...] = (),
                        max_draws: int = 100000) -> BellMixture:
    """Uniform draw on the face of the tetrahedron opposite to Bell state :code:`face` (i.e. :math:`c_{face} = 0`)

    Args:
        rng: Seeded source
        face: Index in :code:`0..3` of the vanishing weight
        entangled_only: Reject separable draws as in :code:`sample_random_mixture`
        key: Sub-stream key
        max_draws: Rejection budget

    Returns:
        The mixture

    """
    if face not in range(4):
        raise DomainError(f'Require face in 0..3 but got {face}')
    return _draw_mixture(rng, entangled_only, key, max_draws, face)


PHI_PLUS = BellMixture(1, 0, 0, 0)
PHI_MINUS = BellMixture(0, 1, 0, 0)
PSI_PLUS = BellMixture(0, 0, 1, 0)
PSI_MINUS = BellMixture(0, 0, 0, 1)
MAXIMALLY_MIXED = BellMixture(0.25, 0.25, 0.25, 0.25)

NAMED_STATES = {
    'phi+': PHI_PLUS,
    'phi-': PHI_MINUS,
    'psi+': PSI_PLUS,
    'psi-': PSI_MINUS,
    'mixed': MAXIMALLY_MIXED
}

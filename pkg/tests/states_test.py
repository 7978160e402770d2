import pytest

import numpy as np

from bellnoise.errors import DensityMatrixError, DomainError, TetrahedronError
from bellnoise.processes import SeededRng
from bellnoise.states import (BellMixture, BlochDiagonal, EnvTopology, MAXIMALLY_MIXED, NAMED_STATES, PHI_MINUS,
                              PHI_PLUS, PSI_MINUS, PSI_PLUS, TwoQubitDensity, a_to_c, c_to_a, density_matrix,
                              initial_negativity, is_separable, negativity, negativity_bell_mixture,
                              partial_transpose, sample_face_mixture, sample_random_mixture, x_matrix)

RANDOM_MIXTURES = [sample_random_mixture(SeededRng(3), key=(i,)) for i in range(1000)]

# rows are |Phi+>, |Phi->, |Psi+>, |Psi-> in the basis |00>, |01>, |10>, |11>
BELL_VECTORS = np.sqrt(0.5) * np.array([
    [1, 0, 0, 1],
    [1, 0, 0, -1],
    [0, 1, 1, 0],
    [0, 1, -1, 0]
], dtype=np.complex128)

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]]
], dtype=np.complex128)


def projector_sum(m: BellMixture) -> np.ndarray:
    return BELL_VECTORS.T @ np.diag(m.c) @ BELL_VECTORS.conj()


def bloch_matrix(b: BlochDiagonal) -> np.ndarray:
    return (np.eye(4) + sum(a * np.kron(s, s) for a, s in zip(b.a, PAULI))) / 4


def eigen_negativity(rho: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(partial_transpose(rho))
    return 2 * np.abs(eigs[eigs < 0].sum())


@pytest.mark.parametrize(
    "m, expected_a",
    [
        (PHI_PLUS, (1, -1, 1)),
        (PHI_MINUS, (-1, 1, 1)),
        (PSI_PLUS, (1, 1, -1)),
        (PSI_MINUS, (-1, -1, -1)),
        (MAXIMALLY_MIXED, (0, 0, 0)),
        (BellMixture(0.1, 0, 0.9, 0), (1, 0.8, -0.8)),
    ],
)
def test_c_to_a(m: BellMixture, expected_a):
    np.testing.assert_allclose(c_to_a(m).a, expected_a, atol=1e-15)
    np.testing.assert_allclose(a_to_c(BlochDiagonal(*expected_a)).c, m.c, atol=1e-15)


def test_c_to_a_round_trip():
    for m in RANDOM_MIXTURES[:100]:
        np.testing.assert_allclose(a_to_c(c_to_a(m)).c, m.c, atol=1e-14)


@pytest.mark.parametrize("m", RANDOM_MIXTURES[:20] + list(NAMED_STATES.values()))
def test_density_matrix_representations_agree(m: BellMixture):
    rho = density_matrix(m).matrix
    np.testing.assert_allclose(rho, projector_sum(m), atol=1e-14)
    np.testing.assert_allclose(rho, bloch_matrix(c_to_a(m)), atol=1e-14)
    assert density_matrix(m).is_x_shaped


@pytest.mark.parametrize(
    "c, match",
    [
        ((0.5, 0.5, 0.5, 0), 'sum'),
        ((1.1, -0.1, 0, 0), 'c_i >= 0'),
        ((np.nan, 1, 0, 0), 'c_i >= 0'),
    ],
)
def test_bell_mixture_validation(c, match: str):
    with pytest.raises(DomainError, match=match):
        BellMixture(*c)


def test_bell_mixture_from_array_shape():
    with pytest.raises(DomainError, match='4 weights'):
        BellMixture.from_array([0.5, 0.5])


@pytest.mark.parametrize("a", [(1, 1, 1), (0, 0, 1.1), (-1, -1, 1)])
def test_bloch_outside_tetrahedron(a):
    with pytest.raises(TetrahedronError, match='tetrahedron'):
        BlochDiagonal(*a)


@pytest.mark.parametrize(
    "matrix, match",
    [
        (np.diag([0.5, 0.5, 0, 0]) + np.eye(4, k=1) * 0.1, 'Hermitian'),
        (np.eye(4) / 2, 'trace'),
        (np.diag([1.5, -0.5, 0, 0]), 'negative eigenvalue'),
        (np.eye(3) / 3, '4 x 4'),
    ],
)
def test_density_validation(matrix: np.ndarray, match: str):
    with pytest.raises(DensityMatrixError, match=match):
        TwoQubitDensity(matrix)


def test_density_is_read_only():
    rho = density_matrix(PHI_PLUS)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0


def test_partial_transpose_bell_state():
    np.testing.assert_allclose(np.linalg.eigvalsh(partial_transpose(density_matrix(PHI_PLUS))),
                               [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


@pytest.mark.parametrize(
    "m, expected",
    [
        (PHI_PLUS, 1),
        (PSI_MINUS, 1),
        (MAXIMALLY_MIXED, 0),
        (BellMixture(0.75, 0, 0.25, 0), 0.5),
        (BellMixture(0.5, 0, 0.5, 0), 0),
        (BellMixture(0.1, 0, 0.9, 0), 0.8),
        (BellMixture(0.1, 0.1, 0.1, 0.7), 0.4),
    ],
)
def test_negativity_bell_mixtures(m: BellMixture, expected: float):
    np.testing.assert_allclose(negativity(density_matrix(m)), expected, atol=1e-14)
    np.testing.assert_allclose(initial_negativity(m), expected, atol=1e-14)


@pytest.mark.parametrize("p", [0, 0.2, 1 / 3, 0.5, 0.9, 1])
def test_negativity_werner(p: float):
    m = BellMixture(*((1 - p) / 4 * np.ones(3)), p + (1 - p) / 4)
    np.testing.assert_allclose(initial_negativity(m), max(0, (3 * p - 1) / 2), atol=1e-14)


def test_negativity_general_state():
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    u = np.kron(hadamard, np.eye(2))
    rotated = TwoQubitDensity(u @ density_matrix(PHI_PLUS).matrix @ u.conj().T)
    assert not rotated.is_x_shaped
    np.testing.assert_allclose(negativity(rotated), 1, atol=1e-12)
    plus = np.array([1, 1]) / np.sqrt(2)
    product = np.kron([1, 0], plus)
    np.testing.assert_allclose(negativity(np.outer(product, product)), 0, atol=1e-15)


def test_initial_negativity_is_max_weight():
    for m in RANDOM_MIXTURES:
        np.testing.assert_allclose(initial_negativity(m), max(0, 2 * m.c.max() - 1), atol=1e-15)
        assert is_separable(m) == (initial_negativity(m) < 1e-12)


@pytest.mark.parametrize("env", list(EnvTopology))
def test_closed_form_negativity_matches_eigenvalues(env: EnvTopology):
    xs = np.geomspace(1e-3, 1, 10)
    for m in RANDOM_MIXTURES:
        closed = negativity_bell_mixture(m, xs, env)
        inner = xs if env == EnvTopology.INDEPENDENT else np.ones_like(xs)
        oracle = [eigen_negativity(x_matrix(m, outer=x * np.exp(-0.7j), inner=i)) for x, i in zip(xs, inner)]
        np.testing.assert_allclose(closed, oracle, atol=1e-12)
        np.testing.assert_allclose(closed, [negativity(x_matrix(m, x, i)) for x, i in zip(xs, inner)],
                                   atol=1e-12)


@pytest.mark.parametrize("x", [0, -0.1, 1.01, np.nan])
def test_negativity_bell_mixture_domain(x: float):
    with pytest.raises(DomainError, match='dephasing factor'):
        negativity_bell_mixture(PHI_PLUS, x)


@pytest.mark.parametrize(
    "env, lam, expected_exponent, expected_a",
    [
        (EnvTopology.INDEPENDENT, 1, 4, 1),
        (EnvTopology.COMMON, 1, 8, 2),
        (EnvTopology.COMMON, 0.5, 2, 2),
    ],
)
def test_env_topology(env: EnvTopology, lam: float, expected_exponent: float, expected_a: int):
    assert env.exponent(lam) == expected_exponent
    assert env.bound_constant == expected_a


def test_sample_random_mixture_reproducible():
    assert sample_random_mixture(SeededRng(1), key=(5,)) == sample_random_mixture(SeededRng(1), key=(5,))
    assert sample_random_mixture(SeededRng(1), key=(5,)) != sample_random_mixture(SeededRng(1), key=(6,))


def test_sample_random_mixture_entangled():
    for i in range(200):
        assert initial_negativity(sample_random_mixture(SeededRng(), entangled_only=True, key=(i,))) > 1e-6


def test_sample_random_mixture_budget():
    with pytest.raises(DomainError, match='No entangled mixture'):
        # about half of the simplex is separable, so 1 draw fails for some key
        for i in range(100):
            sample_random_mixture(SeededRng(), entangled_only=True, key=(i,), max_draws=1)


@pytest.mark.parametrize("face", range(4))
def test_sample_face_mixture(face: int):
    m = sample_face_mixture(SeededRng(9), face)
    assert m.c[face] == 0
    np.testing.assert_allclose(m.c.sum(), 1)


def test_sample_face_mixture_invalid():
    with pytest.raises(DomainError, match='face'):
        sample_face_mixture(SeededRng(), 4)


@pytest.mark.parametrize("face", range(4))
def test_sample_face_mixture_entangled(face: int):
    draws = [sample_face_mixture(SeededRng(9), face, entangled_only=True, key=(i,)) for i in range(50)]
    assert all(m.c[face] == 0 and initial_negativity(m) > 0 for m in draws)
    assert draws[0] == sample_face_mixture(SeededRng(9), face, entangled_only=True, key=(0,))

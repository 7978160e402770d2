import dataclasses
import pytest

import numpy as np

from bellnoise.dynamics import (EvolutionParams, dephasing_factor, evolve, evolve_bloch, mc_evolve, negativity_at,
                                negativity_curve, trajectory)
from bellnoise.errors import DomainError
from bellnoise.grid import TimeGrid
from bellnoise.processes import ProcessSpec, SeededRng, beta
from bellnoise.states import (BellMixture, BlochDiagonal, EnvTopology, PHI_PLUS, PSI_PLUS, density_matrix,
                              negativity, sample_random_mixture)

INDEP, COMMON = EnvTopology.INDEPENDENT, EnvTopology.COMMON
SAMPLED = [ProcessSpec.ou(1), ProcessSpec.wiener(), ProcessSpec.fgn(0.9)]
MIXTURES = [sample_random_mixture(SeededRng(8), key=(i,)) for i in range(30)]


@pytest.mark.parametrize(
    "env, t, expected",
    [
        (INDEP, 0, 1),
        (COMMON, 0, 1),
        (INDEP, 0.25, np.exp(-1)),
        (COMMON, 0.25, np.exp(-2)),
    ],
)
def test_dephasing_factor(env: EnvTopology, t: float, expected: float):
    np.testing.assert_allclose(dephasing_factor(EvolutionParams(ProcessSpec.white(), env), t), expected)


@pytest.mark.parametrize("env", list(EnvTopology))
@pytest.mark.parametrize("m", MIXTURES[:5] + [PHI_PLUS, PSI_PLUS])
def test_evolve_identity_at_zero(env: EnvTopology, m: BellMixture):
    np.testing.assert_array_equal(evolve(m, EvolutionParams(ProcessSpec.ou(2), env), 0).matrix,
                                  density_matrix(m).matrix)


def test_evolve_bell_state():
    p = EvolutionParams(ProcessSpec.ou(1), INDEP, lam=1, omega0=0)
    x = np.exp(-4 * beta(p.spec, 0.8))
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 0.5
    expected[0, 3] = expected[3, 0] = x / 2
    np.testing.assert_allclose(evolve(PHI_PLUS, p, 0.8).matrix, expected, atol=1e-15)


def test_evolve_rotating_coherence():
    p = EvolutionParams(ProcessSpec.wiener(), INDEP, omega0=2)
    rho = evolve(PHI_PLUS, p, 0.3).matrix
    np.testing.assert_allclose(rho[0, 3], dephasing_factor(p, 0.3) * np.exp(-2.4j) / 2)
    np.testing.assert_allclose(rho[3, 0], np.conj(rho[0, 3]))


@pytest.mark.parametrize("t", [0.3, 1, 5])
def test_common_environment_stable_state(t: float):
    p = EvolutionParams(ProcessSpec.fgn(0.7), COMMON)
    np.testing.assert_allclose(evolve(PSI_PLUS, p, t).matrix, density_matrix(PSI_PLUS).matrix, atol=1e-15)


@pytest.mark.parametrize("env", list(EnvTopology))
@pytest.mark.parametrize("spec", SAMPLED + [ProcessSpec.white()])
def test_evolution_structure(env: EnvTopology, spec: ProcessSpec):
    p = EvolutionParams(spec, env, lam=0.8, omega0=1.3)
    for m in MIXTURES[:5]:
        populations = density_matrix(m).matrix.diagonal()
        for t in np.linspace(0, 3, 50):
            rho = evolve(m, p, t).matrix
            np.testing.assert_array_equal(rho.diagonal(), populations)
            np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
            assert np.linalg.eigvalsh(rho).min() >= -1e-10


@pytest.mark.parametrize(
    "env, t, expected",
    [
        (INDEP, 0, (1, -1, 1)),
        (INDEP, np.log(2) / 4, (0.5, -0.5, 1)),
        (COMMON, np.log(2) / 8, (0.5, -0.5, 1)),
    ],
)
def test_evolve_bloch(env: EnvTopology, t: float, expected):
    b = evolve_bloch(BlochDiagonal(1, -1, 1), EvolutionParams(ProcessSpec.white(), env), t)
    np.testing.assert_allclose(b.a, expected, atol=1e-15)


@pytest.mark.parametrize(
    "env, exponent",
    [
        (INDEP, 4),
        (COMMON, 8),
    ],
)
@pytest.mark.parametrize("spec", SAMPLED + [ProcessSpec.white()])
def test_bell_state_negativity(env: EnvTopology, exponent: float, spec: ProcessSpec):
    t = np.linspace(0, 2, 21)
    np.testing.assert_allclose(negativity_at(PHI_PLUS, EvolutionParams(spec, env, lam=0.7), t),
                               np.exp(-exponent * 0.49 * beta(spec, t)), rtol=1e-12, atol=1e-15)


def test_constant_negativity_common():
    n = negativity_curve(BellMixture(0, 0, 0.6, 0.4), EvolutionParams(ProcessSpec.ou(1), COMMON),
                         np.linspace(0, 10, 11))
    np.testing.assert_allclose(n, 0.2, atol=1e-15)


def test_ou_curve_endpoint():
    np.testing.assert_allclose(negativity_at(PHI_PLUS, EvolutionParams(ProcessSpec.ou(1)), 1), np.exp(-4 / np.e))


def test_negativity_far_future():
    n = negativity_curve(PHI_PLUS, EvolutionParams(ProcessSpec.white()), [10, 1000])
    assert np.all(n >= 0) and n[-1] < 1e-300


@pytest.mark.parametrize("env", list(EnvTopology))
@pytest.mark.parametrize("spec", SAMPLED + [ProcessSpec.white()])
def test_negativity_monotone_and_matches_matrix(env: EnvTopology, spec: ProcessSpec):
    p = EvolutionParams(spec, env)
    t = np.linspace(0, 2, 41)
    for m in MIXTURES:
        n = negativity_curve(m, p, t)
        assert np.all(np.diff(n) <= 1e-15)
        np.testing.assert_allclose(n[::8], [negativity(evolve(m, p, s)) for s in t[::8]], atol=1e-12)


@pytest.mark.parametrize("env", list(EnvTopology))
def test_negativity_omega0_independent(env: EnvTopology):
    p = EvolutionParams(ProcessSpec.ou(1), env)
    t = np.linspace(0, 2, 21)
    for m in MIXTURES[:10]:
        curves = [negativity_at(m, dataclasses.replace(p, omega0=w), t) for w in (0, 1, 17)]
        np.testing.assert_array_equal(curves[0], curves[1])
        np.testing.assert_array_equal(curves[0], curves[2])
        for s in (0.3, 1.1):
            np.testing.assert_allclose([negativity(evolve(m, dataclasses.replace(p, omega0=w), s)) for w in (0, 17)],
                                       negativity_at(m, p, s), atol=1e-12)


def test_trajectory_independent():
    m = BellMixture(0.1, 0, 0.9, 0)
    traj = trajectory(m, EvolutionParams(ProcessSpec.wiener()), TimeGrid(10, 100))
    assert list(traj.data_vars) == ['a1', 'a2', 'a3', 'negativity']
    np.testing.assert_array_equal(traj.a3.values, traj.a3.values[0] * np.ones(101))
    np.testing.assert_allclose(traj.a3.values[0], -0.8)
    assert abs(traj.a1.values[-1]) < 1e-6 and abs(traj.a2.values[-1]) < 1e-6
    np.testing.assert_allclose(traj.a1.values[0], 1)
    assert traj.negativity.values[-1] == 0


def test_trajectory_common_fixed_point():
    m = BellMixture(0.1, 0.1, 0.7, 0.1)
    traj = trajectory(m, EvolutionParams(ProcessSpec.ou(1), COMMON), np.linspace(0, 5, 11))
    np.testing.assert_allclose(traj.a1.values, 0.6)
    np.testing.assert_allclose(traj.a2.values, 0.6)
    np.testing.assert_allclose(traj.a3.values, -0.6)


@pytest.mark.parametrize(
    "lam, omega0, match",
    [
        (-1, 1, 'lam'),
        (np.nan, 1, 'lam'),
        (1, -1, 'omega0'),
    ],
)
def test_evolution_params_validation(lam: float, omega0: float, match: str):
    with pytest.raises(DomainError, match=match):
        EvolutionParams(ProcessSpec.white(), lam=lam, omega0=omega0)


@pytest.mark.parametrize("env", list(EnvTopology))
def test_mc_evolve_decoupled(env: EnvTopology):
    p = EvolutionParams(ProcessSpec.ou(1), env, lam=0, omega0=1.7)
    for t in (0.2, 1):
        rho_mc = mc_evolve(MIXTURES[0], p, t, 100, grid_density=32)
        np.testing.assert_allclose(rho_mc.matrix, evolve(MIXTURES[0], p, t).matrix, atol=1e-12)


def test_mc_evolve_corner_coherence():
    n_samples = 10000
    rho = mc_evolve(PHI_PLUS, EvolutionParams(ProcessSpec.ou(1)), 1, n_samples, rng=SeededRng(42))
    assert abs(abs(rho.matrix[0, 3]) - np.exp(-4 / np.e) / 2) <= 2 / np.sqrt(n_samples)


@pytest.mark.parametrize("env", list(EnvTopology))
@pytest.mark.parametrize("spec", SAMPLED)
@pytest.mark.parametrize("t", [0.2, 1])
def test_mc_evolve_matches_analytic(env: EnvTopology, spec: ProcessSpec, t: float):
    n_samples = 10000
    m = BellMixture(0.4, 0.1, 0.35, 0.15)
    p = EvolutionParams(spec, env)
    rho_mc = mc_evolve(m, p, t, n_samples, 256, SeededRng(42), workers=4)
    assert np.abs(rho_mc.matrix - evolve(m, p, t).matrix).max() <= 4 / np.sqrt(n_samples)


def test_mc_evolve_finer_grid():
    n_samples = 10000
    p = EvolutionParams(ProcessSpec.fgn(0.9))
    rho_mc = mc_evolve(PHI_PLUS, p, 1, n_samples, 512, SeededRng(1))
    assert np.abs(rho_mc.matrix - evolve(PHI_PLUS, p, 1).matrix).max() <= 4 / np.sqrt(n_samples)


def test_mc_evolve_independent_of_workers():
    p = EvolutionParams(ProcessSpec.wiener(), INDEP)
    single = mc_evolve(PHI_PLUS, p, 0.5, 700, 64, SeededRng(3), workers=1)
    threaded = mc_evolve(PHI_PLUS, p, 0.5, 700, 64, SeededRng(3), workers=3)
    np.testing.assert_array_equal(single.matrix, threaded.matrix)


def test_mc_evolve_too_few_samples():
    with pytest.raises(DomainError, match='n_samples'):
        mc_evolve(PHI_PLUS, EvolutionParams(ProcessSpec.wiener()), 1, 99)

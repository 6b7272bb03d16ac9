import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfs_forge import basis as bs
from dfs_forge.linalg import DimensionError, SIGMA_Z, expi, random_state
from dfs_forge.lindblad import (IntegrationError, LindbladModel, block_population, contrast_run, encode, evolve,
                                fidelity, lindblad_rhs, mu_state, purity, subsystem_fidelity)
from dfs_forge.stabilizer import coupling_operators

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def dephasing():
    return LindbladModel([SIGMA_Z], [[1.0]])


def test_rhs_without_noise_is_commutator():
    h = np.array([[0.2, 1 - 1j], [1 + 1j, -0.5]])
    m = LindbladModel([SIGMA_Z], [[0.0]], h)
    np.testing.assert_allclose(lindblad_rhs(m, PLUS), -1j * (h @ PLUS - PLUS @ h))


def test_rhs_dephasing_coherence():
    d = lindblad_rhs(dephasing(), PLUS)
    assert d[0, 1] == pytest.approx(-2 * PLUS[0, 1])
    assert d[0, 0] == 0


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 4))
def test_rhs_is_trace_free(seed, k, d):
    rng = np.random.default_rng(seed)
    f_ops = rng.standard_normal((k, d, d)) + 1j * rng.standard_normal((k, d, d))
    g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    h = rng.standard_normal((d, d))
    psi = random_state(d, rng)
    m = LindbladModel(list(f_ops), g @ g.conj().T, h + h.T)
    assert abs(np.trace(lindblad_rhs(m, np.outer(psi, psi.conj())))) <= 1e-12


def test_dephasing_matches_analytic():
    traj = evolve(dephasing(), PLUS, 1.0, 1e-3)
    want = 0.5 * np.exp(-2.0)
    assert abs(traj.final[0, 1] - want) / want <= 1e-6
    for rho in traj.states[::100]:
        assert abs(np.trace(rho) - 1) <= 1e-8
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-10


def test_unitary_case():
    m = LindbladModel([SIGMA_Z], [[0.0]], SIGMA_Z)
    rho0 = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    traj = evolve(m, rho0, 1.0, 1e-3)
    u = expi(SIGMA_Z, -1.0)
    np.testing.assert_allclose(traj.final, u @ rho0 @ u.conj().T, atol=1e-8)


def test_rk4_order():
    def err(dt):
        return abs(evolve(dephasing(), PLUS, 1.0, dt).final[0, 1] - 0.5 * np.exp(-2.0))

    ratio = err(0.1) / err(0.05)
    assert 8 <= ratio <= 32


def test_model_validation():
    with pytest.raises(ValueError):
        LindbladModel([SIGMA_Z, SIGMA_MINUS], [[1, 0], [0, -1]])
    with pytest.raises(DimensionError):
        LindbladModel([SIGMA_Z, np.eye(3)], np.eye(2))
    with pytest.raises(DimensionError):
        LindbladModel([SIGMA_Z], [[1, 0], [0, 1]])
    with pytest.raises(DimensionError):
        lindblad_rhs(dephasing(), np.eye(3) / 3)
    with pytest.raises(ValueError):
        evolve(dephasing(), PLUS, 0.01, 0.1)


def test_large_step_breaks_invariants():
    with pytest.raises(IntegrationError):
        evolve(LindbladModel([SIGMA_Z], [[50.0]]), PLUS, 2.0, 0.5)


def test_encoded_state_at_time_zero():
    blk = bs.block(bs.STRONG, 3, 1)
    lam = np.array([0.6, 0.8j])
    rho = encode(blk, lam, np.eye(2) / 2)
    assert subsystem_fidelity(blk, rho, lam) == pytest.approx(1.0)
    assert block_population(blk, rho) == pytest.approx(1.0)


def test_weak_pair_stays_protected(rng):
    blk = bs.block(bs.WEAK, 2, 0)
    lam = random_state(2, rng)
    model = LindbladModel(coupling_operators(bs.WEAK, 2), [[1.0]])
    traj = evolve(model, encode(blk, lam, np.eye(1)), 3.0, 1e-2)
    assert abs(subsystem_fidelity(blk, traj.final, lam) - 1) <= 1e-8


def test_three_qubit_subsystem_protected_while_gauge_decoheres(rng):
    blk = bs.block(bs.STRONG, 3, 1)
    lam = random_state(2, rng)
    model = LindbladModel(coupling_operators(bs.STRONG, 3), np.eye(3))
    rho0 = encode(blk, lam, np.array([1, 0]))
    traj = evolve(model, rho0, 5.0, 5e-3)
    assert subsystem_fidelity(blk, traj.final, lam) >= 1 - 1e-6
    assert purity(mu_state(blk, traj.final)) < 0.999
    for rho in traj.states[::50]:
        assert abs(block_population(blk, rho) - 1) <= 1e-8


def test_contrast_weak_pair():
    blk = bs.block(bs.WEAK, 2, 0)
    prot = blk.basis @ np.array([1, -1]) / np.sqrt(2)
    unprot = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rep = contrast_run(LindbladModel(coupling_operators(bs.WEAK, 2), [[1.0]]), prot, unprot, 2.0, 1e-2,
                       sample_every=10)
    assert rep.passed
    # S_z dephasing with eigenvalue gap 4: coherence decays as exp(-8 t)
    assert rep.unprotected[-1] == pytest.approx(0.5 * (1 + np.exp(-16.0)), abs=1e-6)


def test_contrast_without_noise():
    m = LindbladModel([np.zeros((2, 2))], [[0.0]])
    rep = contrast_run(m, np.array([1, 0]), np.array([0, 1]), 1.0, 0.1)
    np.testing.assert_allclose(rep.protected, 1)
    np.testing.assert_allclose(rep.unprotected, 1)
    assert not rep.passed


def test_amplitude_damping_ground_state_is_stationary():
    m = LindbladModel([SIGMA_MINUS, SIGMA_Z], np.diag([1.0, 0.0]))
    rep = contrast_run(m, np.array([1, 0]), np.array([0, 1]), 1.0, 1e-3, sample_every=100)
    np.testing.assert_allclose(rep.protected, 1, atol=1e-12)
    np.testing.assert_allclose(rep.unprotected, np.exp(-rep.times), atol=1e-8)


def test_contrast_rejects_unnormalised():
    with pytest.raises(ValueError):
        contrast_run(dephasing(), np.array([1, 1]), np.array([1, 0]), 1.0, 0.1)


def test_fidelity_forms():
    psi = np.array([0.6, 0.8])
    rho = np.outer(psi, psi)
    assert fidelity(rho, psi) == pytest.approx(1.0)
    assert fidelity(rho, rho) == pytest.approx(1.0)
    assert fidelity(np.eye(2) / 2, np.array([1, 0])) == pytest.approx(0.5)

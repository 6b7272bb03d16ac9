import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfs_forge import basis as bs
from dfs_forge.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, basis_state, ket, mat_exp
from dfs_forge.operators import build, collective_matrix, exchange
from dfs_forge.stabilizer import (check_dfs_condition, commutant_action, coupling_operators, detects,
                                  fixed_point_property, kl_check, lindblad_dfs_condition, pauli_string,
                                  sample_disc, stabilizer_element, uniform_pauli, wcd_finite_stabilizer_check, weight_one_paulis)

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


def test_weak_condition_gives_eigenvalue():
    for lam in bs.weak_labels(4):
        rep = check_dfs_condition(bs.wcd_basis(4, lam), [collective_matrix("z", 4)])
        assert rep.passed
        np.testing.assert_allclose(rep.M[0], [[lam]])


def test_three_qubit_subsystem_acts_as_paulis():
    rep = check_dfs_condition(bs.scd_full_basis(3, 1), coupling_operators(bs.STRONG, 3))
    assert rep.passed
    for m, want in zip(rep.M, (SIGMA_X, -SIGMA_Y, -SIGMA_Z)):
        np.testing.assert_allclose(m, want, atol=1e-12)


def test_exchange_acts_on_degeneracy_factor_only():
    blk = bs.scd_full_basis(3, 1)
    e12 = build(exchange(1, 2, 3))
    assert not check_dfs_condition(blk, [e12]).passed
    a, dev = commutant_action(blk, e12)
    assert dev <= 1e-12
    np.testing.assert_allclose(a, np.diag([-1, 1]), atol=1e-12)


def test_lindblad_condition_examples():
    ground = bs.wcd_basis(1, 1)  # span{|0>}
    rep = lindblad_dfs_condition(ground, [SIGMA_MINUS, SIGMA_Z])
    assert rep.passed
    assert [complex(m[0, 0]) for m in rep.M] == [0, 1]
    assert lindblad_dfs_condition(bs.scd_full_basis(4, 0), [np.eye(16)]).passed
    assert not lindblad_dfs_condition(bs.wcd_basis(1, -1), [SIGMA_MINUS]).passed


def test_stabilizer_trivial_parameters():
    blk = bs.scd_full_basis(3, 1)
    np.testing.assert_allclose(stabilizer_element(blk, np.zeros(3)).realized, np.eye(8))
    with pytest.raises(ValueError):
        stabilizer_element(blk, [1.0])


def test_stabilizer_rejects_non_dfs_ops():
    with pytest.raises(ValueError):
        stabilizer_element(bs.wcd_basis(2, 0), [0.3], ops=[build(exchange(1, 2, 2)) + np.diag([0, 1, 0, 0])])


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.sampled_from(bs.weak_labels(n)))),
       st.floats(-np.pi, np.pi))
def test_weak_stabilizer_factorizes(n_lam, theta):
    n, lam = n_lam
    el = stabilizer_element(bs.wcd_basis(n, lam), [1j * theta])
    p = mat_exp(1j * theta * SIGMA_Z)
    prod = np.ones((1, 1))
    for _ in range(n):
        prod = np.kron(prod, p)
    np.testing.assert_allclose(el.realized, np.exp(-1j * lam * theta) * prod, atol=1e-10)


def test_singlet_pair_fixed_and_complement_moved(rng):
    blk = bs.scd_full_basis(4, 0)
    rep = fixed_point_property(blk, rng, n_v=30, n_states=10)
    assert rep["block_max_deviation"] <= 1e-9
    assert rep["orth_min_violation"] >= 1e-3


@pytest.mark.parametrize("model,n", [(bs.WEAK, 3), (bs.STRONG, 3), (bs.WEAK, 4), (bs.STRONG, 5)])
def test_fixed_point_iff_membership(model, n, rng):
    for blk in bs.blocks(model, n):
        rep = fixed_point_property(blk, rng, n_v=20, n_states=5)
        assert rep["block_max_deviation"] <= 1e-9
        if rep["n_states"]:
            assert rep["orth_min_violation"] >= 1e-3


@pytest.mark.parametrize("n,lam,bits,expected", [(2, 0, "01", True), (3, 1, "001", True), (3, 1, "111", False)])
def test_finite_stabilizer_examples(n, lam, bits, expected):
    assert wcd_finite_stabilizer_check(n, lam, basis_state(bits)) is expected


def test_finite_stabilizer_resolves_lambda_mod_n():
    # n=2: lambda=0 and lambda=+-2 differ by n, so |00> (lambda=2) also passes for lambda=0
    assert wcd_finite_stabilizer_check(2, 0, basis_state("00"))
    for n in range(2, 6):
        for lam in bs.weak_labels(n):
            blk = bs.wcd_basis(n, lam)
            assert all(wcd_finite_stabilizer_check(n, lam, blk.basis[:, k]) for k in range(blk.dim))


def test_detects_examples():
    z3 = uniform_pauli("z", 3)
    assert detects([z3], pauli_string({1: "x"}, 3))
    assert not detects([z3], pauli_string({1: "x", 2: "x"}, 3))
    stabs = [uniform_pauli(a, 4) for a in "xyz"]
    assert detects(stabs, pauli_string({2: "z"}, 4))


@pytest.mark.parametrize("n", range(1, 6))
def test_odd_bit_flips_detected(n):
    z = uniform_pauli("z", n)
    for mask in range(1, 2**n):
        sites = [q + 1 for q in range(n) if mask >> q & 1]
        for axis in "xy":
            err = pauli_string({q: axis for q in sites}, n)
            assert detects([z], err) is (len(sites) % 2 == 1)


def test_detects_symmetric_in_order():
    z = uniform_pauli("z", 3)
    x1 = pauli_string({1: "x"}, 3)
    assert detects([z], x1) == detects([x1], z)


def test_kl_weight_one_on_four_qubit_singlets():
    rep = kl_check(bs.scd_full_basis(4, 0), weight_one_paulis(4))
    assert rep.passed and rep.worst_deviation <= 1e-10
    np.testing.assert_allclose(rep.c, 0, atol=1e-12)


def test_kl_identity_is_trivial():
    rep = kl_check(bs.scd_full_basis(3, 1), [np.eye(8)])
    assert rep.passed
    np.testing.assert_allclose(rep.c, [[1]])


def test_kl_pairs_of_weight_one_fail_with_structure():
    rep = kl_check(bs.scd_full_basis(4, 0), weight_one_paulis(4), pairs=True)
    assert not rep.passed
    assert rep.worst_deviation == pytest.approx(2 / 3, abs=1e-9)
    xx = kl_check(bs.scd_full_basis(4, 0), [pauli_string({1: "x", 2: "x"}, 4)])
    assert not xx.passed and xx.worst_deviation == pytest.approx(2 / 3, abs=1e-9)


def test_singlet_columns_are_states():
    blk = bs.scd_full_basis(2, 0)
    np.testing.assert_allclose(blk.basis[:, 0], ket({"01": 1, "10": -1}) / np.sqrt(2))


def test_singlet_stays_fixed_under_triplet_stabilizer(rng):
    # every collective generator annihilates J=0, so the zero off-block extension fixes it
    blk = bs.block(bs.STRONG, 2, 2)
    singlet = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    for _ in range(10):
        el = stabilizer_element(blk, sample_disc(rng, 3))
        assert el.violation(singlet) <= 1e-12

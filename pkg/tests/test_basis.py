import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfs_forge import basis as bs
from dfs_forge.linalg import ket
from dfs_forge.operators import build, collective_matrix, partial_sq

R2, R6 = math.sqrt(2), math.sqrt(6)


def same_up_to_phase(a, b, tol=1e-10):
    p = np.vdot(a, b)
    return abs(abs(p) - 1) <= tol and np.max(np.abs(b - p * a)) <= tol


# -- weak ----------------------------------------------------------------------

def test_weak_two_qubit_zero_block():
    blk = bs.wcd_basis(2, 0)
    assert blk.n_J == 2 and blk.d_J == 1
    np.testing.assert_array_equal(blk.basis[:, 0], ket({"01": 1}))
    np.testing.assert_array_equal(blk.basis[:, 1], ket({"10": 1}))


def test_weak_membership_and_degeneracy():
    blk = bs.wcd_basis(4, 0)
    assert (1, -1, 1, -1) in blk.paths  # |0101>
    assert bs.wcd_basis(5, 1).n_J == math.comb(5, 2) == 10


@pytest.mark.parametrize("n,lam", [(3, 0), (4, 3), (2, 4)])
def test_weak_parity_errors(n, lam):
    with pytest.raises(bs.ParityError):
        bs.wcd_basis(n, lam)


@pytest.mark.parametrize("n", range(1, 8))
def test_weak_completeness(n):
    assert sum(bs.wcd_degeneracy(n, lam) for lam in bs.weak_labels(n)) == 2**n
    sz = np.diag(collective_matrix("z", n)).real
    for lam in bs.weak_labels(n):
        blk = bs.wcd_basis(n, lam)
        idx = np.nonzero(blk.basis)[0]
        np.testing.assert_array_equal(sz[idx], lam)


# -- strong degeneracies ------------------------------------------------------------

@pytest.mark.parametrize("n,twoJ,count", [(6, 2, 9), (3, 1, 2), (10, 0, 42), (1, 1, 1), (6, 0, 5)])
def test_strong_degeneracy_examples(n, twoJ, count):
    assert bs.scd_degeneracy(n, twoJ) == count


def brute_force_walks(n, twoJ):
    total = 0
    for bits in range(2 ** (n - 1)):
        level, ok = 1, True
        for k in range(n - 1):
            level += 1 if bits >> k & 1 else -1
            if level < 0:
                ok = False
                break
        total += ok and level == twoJ
    return total


@pytest.mark.parametrize("n", range(1, 15))
def test_formula_equals_path_counts(n):
    for twoJ in bs.strong_labels(n):
        f = bs.scd_degeneracy(n, twoJ)
        assert f == bs.count_scd_paths(n, twoJ) == len(bs.scd_paths(n, twoJ))
        if n <= 12:
            assert f == brute_force_walks(n, twoJ)


@pytest.mark.parametrize("n", range(2, 15))
def test_pascal_recurrence(n):
    def nj(m, t):
        return bs.scd_degeneracy(m, t) if 0 <= t <= m and (m - t) % 2 == 0 else 0

    for twoJ in bs.strong_labels(n):
        assert nj(n, twoJ) == nj(n - 1, twoJ - 1) + nj(n - 1, twoJ + 1)


@pytest.mark.parametrize("n", range(1, 13))
def test_strong_completeness(n):
    assert sum(bs.scd_degeneracy(n, t) * (t + 1) for t in bs.strong_labels(n)) == 2**n


# -- strong states ------------------------------------------------------------------

def test_maximal_state_examples():
    np.testing.assert_allclose(bs.scd_maximal_state((1, -1, 1)), ket({"011": 1, "101": -1}) / R2, atol=1e-15)
    # the recursion's negative alpha flips the overall sign of this row
    np.testing.assert_allclose(bs.scd_maximal_state((1, 1, -1)), -ket({"110": 2, "101": -1, "011": -1}) / R6,
                               atol=1e-15)
    np.testing.assert_allclose(bs.scd_maximal_state((1,) * 5), ket({"11111": 1}))
    with pytest.raises(ValueError):
        bs.scd_maximal_state((1, -1, -1))


def test_small_blocks_against_hand_states():
    singlet = bs.scd_full_basis(2, 0)
    assert singlet.basis.shape == (4, 1)
    assert same_up_to_phase(singlet.basis[:, 0], ket({"01": 1, "10": -1}) / R2)

    b4 = bs.scd_full_basis(4, 0)
    zero = ket({"0101": 1, "0110": -1, "1001": -1, "1010": 1}) / 2
    one = ket({"0011": 2, "1100": 2, "0101": -1, "1010": -1, "0110": -1, "1001": -1}) / math.sqrt(12)
    assert same_up_to_phase(b4.column(0), zero)
    assert same_up_to_phase(b4.column(1), one)

    b5 = bs.scd_full_basis(5, 1)
    assert b5.basis.shape == (32, 10)
    np.testing.assert_allclose(b5.basis.conj().T @ b5.basis, np.eye(10), atol=1e-10)


def test_strong_path_order_is_down_first():
    assert bs.scd_paths(3, 1) == [(1, -1, 1), (1, 1, -1)]
    assert bs.scd_paths(4, 0) == [(1, -1, 1, -1), (1, 1, -1, -1)]


@pytest.mark.parametrize("n", range(1, 7))
def test_strong_blocks_orthonormal_and_spin_eigen(n):
    s2 = build(partial_sq(n, n))
    for twoJ in bs.strong_labels(n):
        blk = bs.scd_full_basis(n, twoJ)
        assert blk.dim == blk.n_J * (twoJ + 1)
        np.testing.assert_allclose(blk.basis.conj().T @ blk.basis, np.eye(blk.dim), atol=1e-10)
        J = twoJ / 2
        assert np.max(np.abs(s2 @ blk.basis - J * (J + 1) * blk.basis)) <= 1e-9


@pytest.mark.parametrize("n", range(1, 7))
def test_collective_action_is_identity_on_degeneracy(n):
    for twoJ in bs.strong_labels(n):
        blk = bs.scd_full_basis(n, twoJ)
        p = bs.collective_block_action(twoJ)
        for a in "xyz":
            got = blk.basis.conj().T @ collective_matrix(a, n) @ blk.basis
            np.testing.assert_allclose(got, np.kron(np.eye(blk.n_J), p[a]), atol=1e-9)


def test_three_qubit_half_block_uses_paulis():
    p = bs.collective_block_action(1)
    np.testing.assert_allclose(p["x"], [[0, 1], [1, 0]])
    np.testing.assert_allclose(p["y"], [[0, 1j], [-1j, 0]])
    np.testing.assert_allclose(p["z"], [[-1, 0], [0, 1]])


@pytest.mark.parametrize("n", [2, 4, 6])
def test_singlet_products_have_zero_spin(n):
    psi = bs.singlet_product_state(n)
    blk = bs.scd_full_basis(n, 0)
    proj = blk.basis.conj().T @ psi
    assert abs(np.linalg.norm(proj) - 1) <= 1e-10
    assert np.linalg.norm(psi - blk.basis @ proj) <= 1e-10
    with pytest.raises(ValueError):
        bs.singlet_product_state(3)


# -- two-deep states ----------------------------------------------------------------

def test_bb_is_grandparent_plus_two_ups():
    out = bs.two_deep_states(5, 3, kinds=("BB",))
    gp = bs.scd_paths(3, 1)[0]
    np.testing.assert_allclose(out["BB"], np.kron(bs.scd_maximal_state(gp), ket({"11": 1})))


def test_tb_coefficients_at_half():
    J = 0.5
    c0, c1 = -math.sqrt(2 * J / (2 * J + 1)), 1 / math.sqrt(2 * J + 1)
    assert (c0, c1) == pytest.approx((-math.sqrt(0.5), math.sqrt(0.5)))
    # TB for n=3, 2J=1 from grandparent up-spin: c0|1>|01> + c1|0>|11>
    psi = bs.two_deep_states(3, 1, kinds=("TB",))["TB"]
    np.testing.assert_allclose(psi, c0 * ket({"101": 1}) + c1 * ket({"011": 1}), atol=1e-15)


def test_missing_two_deep_state_raises():
    with pytest.raises(bs.BoundaryError):
        bs.two_deep_states(3, 1, kinds=("TT",))  # grandparent would need 2J=3 on one qubit
    with pytest.raises(bs.BoundaryError):
        bs.two_deep_states(4, 0, kinds=("TB",))  # would step below zero
    with pytest.raises(bs.BoundaryError):
        bs.two_deep_states(2, 0)


@pytest.mark.parametrize("n", range(3, 9))
def test_two_deep_matches_recursion(n):
    for twoJ in bs.strong_labels(n):
        for path in bs.scd_paths(n, twoJ):
            kind = bs.two_deep_kind(path)
            got = bs.two_deep_states(n, twoJ, kinds=(kind,), prefixes={kind: path[:-2]})[kind]
            np.testing.assert_allclose(got, bs.scd_maximal_state(path), atol=1e-12)


scd_paths_st = st.integers(1, 9).flatmap(
    lambda n: st.sampled_from(bs.strong_labels(n)).flatmap(lambda t: st.sampled_from(bs.scd_paths(n, t))))


@given(scd_paths_st)
def test_maximal_state_is_normalized_top_weight(path):
    n, twoJ = len(path), sum(path)
    psi = bs.scd_maximal_state(path)
    assert abs(np.linalg.norm(psi) - 1) <= 1e-12
    sz = collective_matrix("z", n)
    # |1> is spin up, so S_z reads -2 m
    np.testing.assert_allclose(sz @ psi, -twoJ * psi, atol=1e-12)

"""Membership, stabilizer and error-detection checks for DFS blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import STRONG, WEAK, DfsBlock
from .linalg import DimensionError, dagger, mat_exp, max_abs
from .operators import PAULI, collective_matrix, embed

STRUCTURE_TOL = 1e-9
ANTICOMMUTE_TOL = 1e-10


def _reshape(block: DfsBlock, op: np.ndarray) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    dim = block.basis.shape[0]
    if op.shape != (dim, dim):
        raise DimensionError(f"operator shape {op.shape} does not act on dimension {dim}")
    r = dagger(block.basis) @ op @ block.basis
    return r.reshape(block.n_J, block.d_J, block.n_J, block.d_J)


def leakage(block: DfsBlock, op) -> float:
    """``||(I - B B^dag) op B||_max``."""
    b = block.basis
    ob = np.asarray(op) @ b
    return max_abs(ob - b @ (dagger(b) @ ob))


def dimension_action(block: DfsBlock, op) -> tuple[np.ndarray, float]:
    """Best ``M`` with ``B^dag op B = I_{n_J} (x) M`` and the max deviation from that form."""
    r = _reshape(block, op)
    m = np.einsum("ajak->jk", r) / block.n_J
    target = np.einsum("ab,jk->ajbk", np.eye(block.n_J), m)
    return m, max_abs(r - target)


def commutant_action(block: DfsBlock, op) -> tuple[np.ndarray, float]:
    """Best ``A`` with ``B^dag op B = A (x) I_{d_J}`` and the max deviation from that form."""
    r = _reshape(block, op)
    a = np.einsum("ajbj->ab", r) / block.d_J
    target = np.einsum("ab,jk->ajbk", a, np.eye(block.d_J))
    return a, max_abs(r - target)


@dataclass
class ConditionReport:
    check: str
    passed: bool
    worst_deviation: float
    M: list
    leakage: list
    deviation: list

    def to_json(self) -> dict:
        from .io import encode_matrix

        return {
            "check": self.check,
            "pass": self.passed,
            "worst_deviation": self.worst_deviation,
            "details": {
                "M": [encode_matrix(m) for m in self.M],
                "leakage": self.leakage,
                "form_deviation": self.deviation,
            },
        }


def check_dfs_condition(block: DfsBlock, ops, tol: float = STRUCTURE_TOL, check: str = "dfs_condition") -> ConditionReport:
    """Each op must keep the block invariant and act as ``I_{n_J} (x) M``."""
    ms, leaks, devs = [], [], []
    for op in ops:
        m, dev = dimension_action(block, op)
        ms.append(m)
        devs.append(dev)
        leaks.append(leakage(block, op))
    worst = max(devs + leaks, default=0.0)
    return ConditionReport(check, worst <= tol, worst, ms, leaks, devs)


def lindblad_dfs_condition(block: DfsBlock, f_ops, tol: float = STRUCTURE_TOL) -> ConditionReport:
    """Master-equation form of the condition; ``f_ops`` need not be Hermitian."""
    return check_dfs_condition(block, f_ops, tol, check="lindblad_dfs_condition")


def coupling_operators(model: str, n: int) -> list[np.ndarray]:
    if model == WEAK:
        return [collective_matrix("z", n)]
    return [collective_matrix(a, n) for a in ("x", "y", "z")]


@dataclass
class StabilizerElement:
    generator: np.ndarray
    v: np.ndarray
    realized: np.ndarray

    def violation(self, state) -> float:
        state = np.asarray(state, dtype=complex)
        return float(np.linalg.norm(self.realized @ state - state))


def stabilizer_element(block: DfsBlock, v, ops=None, tol: float = STRUCTURE_TOL) -> StabilizerElement:
    """``D(v) = exp(sum_a v_a (S_a - Lambda_a))``.

    Weak blocks use ``Lambda = lambda_J I`` on the whole space, the literal
    one-axis form.  Strong blocks use ``Lambda_a = B (I (x) M_a) B^dag``,
    zero off the block.
    """
    ops = coupling_operators(block.model, block.n) if ops is None else list(ops)
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if v.shape != (len(ops),):
        raise ValueError(f"need {len(ops)} stabilizer parameters, got {v.shape}")
    report = check_dfs_condition(block, ops, tol)
    if not report.passed:
        raise ValueError(f"block fails the DFS condition (deviation {report.worst_deviation:.3g})")
    dim = block.basis.shape[0]
    gen = np.zeros((dim, dim), dtype=complex)
    for va, op, m in zip(v, ops, report.M):
        if block.model == WEAK:
            lam = np.eye(dim) * m[0, 0]
        else:
            lam = block.basis @ np.kron(np.eye(block.n_J), m) @ dagger(block.basis)
        gen += va * (np.asarray(op) - lam)
    return StabilizerElement(gen, v, mat_exp(gen))


def z_one_over_n(n: int) -> np.ndarray:
    w = np.exp(2j * np.pi / n)
    return np.diag([w, np.conj(w)])


def wcd_finite_stabilizer(n: int, lam: int) -> np.ndarray:
    """``exp(-2 pi i lam / n) Z_{1/n}^{(x) n}`` as a diagonal matrix."""
    z = np.ones(1, dtype=complex)
    for _ in range(n):
        z = np.kron(z, np.diag(z_one_over_n(n)))
    return np.diag(np.exp(-2j * np.pi * lam / n) * z)


def wcd_finite_stabilizer_check(n: int, lam: int, state, tol: float = STRUCTURE_TOL) -> bool:
    """Fixed-point test of the finite stabilizer.

    The phase seen by a bitstring is ``exp(2 pi i (#0 - #1 - lam) / n)``, so the
    test resolves ``lambda_J`` modulo ``n``.
    """
    state = np.asarray(state, dtype=complex)
    g = wcd_finite_stabilizer(n, lam)
    return bool(np.linalg.norm(g @ state - state) <= tol)


def detects(stabilizers, error, tol: float = ANTICOMMUTE_TOL) -> bool:
    """True if some listed stabilizer element anticommutes with ``error``."""
    e = np.asarray(error, dtype=complex)
    for s in stabilizers:
        s = np.asarray(s, dtype=complex)
        se, es = s @ e, e @ s
        if max_abs(se + es) <= tol and max_abs(se) > tol:
            return True
    return False


def pauli_string(ops: dict[int, str], n: int) -> np.ndarray:
    """Tensor product with Pauli ``ops[q]`` on qubit q and identity elsewhere."""
    out = np.eye(2**n, dtype=complex)
    for q, a in ops.items():
        out = out @ embed(PAULI[a], [q], n)
    return out


def uniform_pauli(axis: str, n: int) -> np.ndarray:
    return pauli_string({q: axis for q in range(1, n + 1)}, n)


def weight_one_paulis(n: int) -> list[np.ndarray]:
    return [pauli_string({q: a}, n) for q in range(1, n + 1) for a in ("x", "y", "z")]


@dataclass
class KlReport:
    c: np.ndarray
    passed: bool
    worst_deviation: float
    mode: str

    def to_json(self) -> dict:
        from .io import encode_matrix

        return {"check": f"kl_{self.mode}", "pass": self.passed, "worst_deviation": self.worst_deviation,
                "details": {"c": encode_matrix(self.c)}}


def kl_check(block: DfsBlock, errors, pairs: bool = False, tol: float = 1e-10) -> KlReport:
    """Knill-Laflamme structure ``<i| E_b^dag E_a |j> = c_ab delta_ij`` on the block.

    With ``pairs=False`` the list is checked against the identity partner
    (``E_b = I``), i.e. detection of each listed error; ``pairs=True`` forms
    every product ``E_b^dag E_a`` (correction).  For subsystem blocks the
    structure is ``I_{n_J} (x) g_ab`` on the degeneracy factor.
    """
    errors = [np.asarray(e, dtype=complex) for e in errors]
    partners = errors if pairs else [np.eye(block.basis.shape[0], dtype=complex)]
    c = np.zeros((len(errors), len(partners)), dtype=complex)
    worst = 0.0
    for a, ea in enumerate(errors):
        for b, eb in enumerate(partners):
            prod = dagger(eb) @ ea
            if block.d_J == 1:
                r = dagger(block.basis) @ prod @ block.basis
                val = np.trace(r) / block.n_J
                dev = max_abs(r - val * np.eye(block.n_J))
            else:
                g, dev = dimension_action(block, prod)
                val = np.trace(g) / block.d_J
            c[a, b] = val
            worst = max(worst, dev)
    return KlReport(c, worst <= tol, worst, "pairs" if pairs else "detect")


def sample_disc(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform samples from the complex unit disc."""
    r = np.sqrt(rng.uniform(0, 1, size))
    phi = rng.uniform(0, 2 * np.pi, size)
    return r * np.exp(1j * phi)


def random_orthogonal_state(block: DfsBlock, rng: np.random.Generator) -> np.ndarray:
    dim = block.basis.shape[0]
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v = v - block.basis @ (dagger(block.basis) @ v)
    return v / np.linalg.norm(v)


def fixed_point_property(block: DfsBlock, rng: np.random.Generator, n_v: int = 200, n_states: int = 20) -> dict:
    """Every block column fixed by every sampled ``D(v)``; random orthogonal states are not.

    Each orthogonal ``psi`` is scored by its largest ``||D(v) psi - psi||`` over the
    sampled ``v``; ``orth_min_violation`` is the smallest such score.  Any state in
    the ``J = 0`` sector is annihilated by every collective generator, so with the
    zero off-block extension it stays fixed whichever strong block is chosen.
    """
    n_ops = 1 if block.model == WEAK else 3
    states = [random_orthogonal_state(block, rng) for _ in range(n_states)] if block.basis.shape[1] < block.basis.shape[0] else []
    col_worst = 0.0
    best = np.zeros(len(states))
    for _ in range(n_v):
        el = stabilizer_element(block, sample_disc(rng, n_ops))
        col_worst = max(col_worst, max_abs(el.realized @ block.basis - block.basis))
        for k, psi in enumerate(states):
            best[k] = max(best[k], el.violation(psi))
    orth_min = float(best.min()) if states else float("inf")
    return {"block_max_deviation": col_worst, "orth_min_violation": orth_min, "n_states": len(states)}


__all__ = [
    "STRONG", "WEAK", "ConditionReport", "KlReport", "StabilizerElement", "check_dfs_condition",
    "commutant_action", "detects", "dimension_action", "fixed_point_property", "kl_check", "leakage",
    "lindblad_dfs_condition", "stabilizer_element", "uniform_pauli", "wcd_finite_stabilizer_check",
    "weight_one_paulis",
]

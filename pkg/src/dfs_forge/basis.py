"""Path labels and explicit orthonormal bases for collective-decoherence DFS blocks.

Weak model
    A block is an eigenspace of ``S_z`` with eigenvalue ``lam = #0 - #1``.
    Paths are step sequences of +-1 (``+1`` appends ``|0>``), ordered like the
    bitstrings they spell, so columns come in ascending basis-index order.

Strong model
    Half-integer angular momenta are carried as ``twoJ = 2J``.  Paths are
    sequences of +-1 in units of 1/2, starting with an up step, whose partial
    sums never go negative.  ``|1>`` plays the role of ``m = +1/2``.
    Paths are ordered lexicographically by their sequence of partial sums, so
    the singlet-first states (e.g. ``|1/2, 0, 1/2>`` before ``|1/2, 1, 1/2>``)
    get the lower degeneracy index.  Columns are degeneracy-major with
    ``m_J`` running from ``+J`` down to ``-J``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .linalg import check_dim

WEAK, STRONG = "weak", "strong"


class ParityError(ValueError):
    """Block label incompatible with the qubit count."""


class BoundaryError(ValueError):
    """A requested state does not exist for this (n, J)."""


@dataclass(frozen=True)
class DfsBlock:
    model: str
    n: int
    label: int  # lambda_J for weak, 2J for strong
    paths: tuple
    basis: np.ndarray
    n_J: int
    d_J: int

    @property
    def twoJ(self) -> int:
        return self.label

    @property
    def dim(self) -> int:
        return self.n_J * self.d_J

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def column(self, lam: int, mu: int = 0) -> np.ndarray:
        return self.basis[:, lam * self.d_J + mu]

    def to_json(self) -> dict:
        from .io import encode_matrix

        return {
            "model": self.model,
            "n": self.n,
            "twoJ": self.label,
            "n_J": self.n_J,
            "d_J": self.d_J,
            "paths": [list(p) for p in self.paths],
            "basis": encode_matrix(self.basis),
        }


# -- weak collective decoherence --------------------------------------------

def check_weak_label(n: int, lam: int) -> None:
    if n < 1 or abs(lam) > n or (n - lam) % 2:
        raise ParityError(f"lambda_J={lam} not admissible for n={n}")


def weak_labels(n: int) -> list[int]:
    return list(range(n, -n - 1, -2))


def wcd_paths(n: int, lam: int) -> list[tuple[int, ...]]:
    check_weak_label(n, lam)
    ones = (n - lam) // 2
    out = []
    for pos in combinations(range(n), ones):
        steps = [1] * n
        for p in pos:
            steps[p] = -1
        out.append(tuple(steps))
    # ascending bitstring order (+1 <-> '0' sorts first)
    out.sort(key=lambda s: [0 if x == 1 else 1 for x in s])
    return out


def path_bits(steps) -> str:
    return "".join("0" if s == 1 else "1" for s in steps)


def wcd_basis(n: int, lam: int) -> DfsBlock:
    check_dim(2**n)
    paths = wcd_paths(n, lam)
    basis = np.zeros((2**n, len(paths)), dtype=complex)
    for c, p in enumerate(paths):
        basis[int(path_bits(p), 2), c] = 1.0
    return DfsBlock(WEAK, n, lam, tuple(paths), basis, len(paths), 1)


def wcd_degeneracy(n: int, lam: int) -> int:
    check_weak_label(n, lam)
    return math.comb(n, (n - lam) // 2)


# -- strong collective decoherence ------------------------------------------

def check_strong_label(n: int, twoJ: int) -> None:
    if n < 1 or twoJ < 0 or twoJ > n or (n - twoJ) % 2:
        raise ParityError(f"2J={twoJ} not admissible for n={n}")


def strong_labels(n: int) -> list[int]:
    """Admissible ``2J`` values for n qubits, in ascending order."""
    return list(range(n % 2, n + 1, 2))


def scd_degeneracy(n: int, twoJ: int) -> int:
    """``(2J+1) n! / ((n/2+J+1)! (n/2-J)!)`` in exact integer arithmetic."""
    check_strong_label(n, twoJ)
    num = (twoJ + 1) * math.factorial(n)
    den = math.factorial((n + twoJ) // 2 + 1) * math.factorial((n - twoJ) // 2)
    q, r = divmod(num, den)
    assert r == 0
    return q


def partial_sums(steps) -> tuple[int, ...]:
    out, acc = [], 0
    for s in steps:
        acc += s
        out.append(acc)
    return tuple(out)


def is_scd_path(steps) -> bool:
    sums = partial_sums(steps)
    return bool(steps) and steps[0] == 1 and all(s in (1, -1) for s in steps) and min(sums) >= 0


@lru_cache(maxsize=None)
def _scd_paths(n: int, twoJ: int) -> tuple[tuple[int, ...], ...]:
    out: list[tuple[int, ...]] = []

    def walk(prefix, level):
        k = len(prefix)
        remaining = n - k
        if remaining == 0:
            if level == twoJ:
                out.append(tuple(prefix))
            return
        if abs(level - twoJ) > remaining:
            return
        # down before up: lexicographic in the partial sums
        for step in (-1, 1):
            nxt = level + step
            if nxt < 0 or (k == 0 and step == -1):
                continue
            prefix.append(step)
            walk(prefix, nxt)
            prefix.pop()

    walk([], 0)
    return tuple(out)


def scd_paths(n: int, twoJ: int) -> list[tuple[int, ...]]:
    check_strong_label(n, twoJ)
    return list(_scd_paths(n, twoJ))


def _append(state: np.ndarray, bit: int) -> np.ndarray:
    e = np.zeros(2, dtype=complex)
    e[bit] = 1.0
    return np.kron(state, e)


def lower(state: np.ndarray, n: int) -> np.ndarray:
    """Apply ``sum_j |0><1|_j`` (the collective ``s_-`` for ``|1> = m=+1/2``)."""
    idx = np.arange(2**n)
    out = np.zeros_like(state)
    for q in range(n):
        mask = 1 << q
        src = idx[(idx & mask) != 0]
        out[src ^ mask] += state[src]
    return out


def down_coefficients(twoJ: int) -> tuple[float, float]:
    """``(alpha, beta)`` for stepping down to total spin ``J = twoJ/2``."""
    J = twoJ / 2
    return -math.sqrt((2 * J + 1) / (2 * J + 2)), 1.0 / math.sqrt(2 * J + 2)


def _lowered(state: np.ndarray, k: int, twoJ: int, two_m: int) -> np.ndarray:
    J, m = twoJ / 2, two_m / 2
    norm = math.sqrt(J * (J + 1) - m * (m - 1))
    return lower(state, k) / norm


def scd_maximal_state(path) -> np.ndarray:
    """``m_J = J`` state of a path, built one qubit at a time."""
    steps = tuple(int(s) for s in path)
    if not is_scd_path(steps):
        raise ValueError(f"invalid strong-collective path {steps}")
    check_dim(2 ** len(steps))
    state = np.array([0, 1], dtype=complex)
    level = 1
    for k, s in enumerate(steps[1:], start=1):
        if s == 1:
            state = _append(state, 1)
        else:
            t_plus = state
            t_minus = _lowered(state, k, level, level)
            alpha, beta = down_coefficients(level - 1)
            state = alpha * _append(t_plus, 0) + beta * _append(t_minus, 1)
        level += s
    return state


def spin_ladder(state: np.ndarray, n: int, twoJ: int) -> list[np.ndarray]:
    """``[|J, J>, |J, J-1>, ..., |J, -J>]`` from the maximal state."""
    out = [state]
    for two_m in range(twoJ, -twoJ, -2):
        out.append(_lowered(out[-1], n, twoJ, two_m))
    return out


def scd_full_basis(n: int, twoJ: int) -> DfsBlock:
    check_strong_label(n, twoJ)
    check_dim(2**n)
    paths = scd_paths(n, twoJ)
    cols = []
    for p in paths:
        cols.extend(spin_ladder(scd_maximal_state(p), n, twoJ))
    basis = np.array(cols, dtype=complex).T
    return DfsBlock(STRONG, n, twoJ, tuple(paths), basis, len(paths), twoJ + 1)


def spin_matrices(twoJ: int) -> dict[str, np.ndarray]:
    """Standard ``J_x, J_y, J_z`` in the ``m = J, ..., -J`` basis."""
    J = twoJ / 2
    ms = [J - k for k in range(twoJ + 1)]
    jp = np.zeros((twoJ + 1, twoJ + 1), dtype=complex)
    for k in range(1, twoJ + 1):
        m = ms[k]
        jp[k - 1, k] = math.sqrt(J * (J + 1) - m * (m + 1))
    jm = jp.conj().T
    return {"x": (jp + jm) / 2, "y": (jp - jm) / 2j, "z": np.diag(ms).astype(complex)}


def collective_block_action(twoJ: int) -> dict[str, np.ndarray]:
    """Matrices ``P_a`` with ``B^dag S_a B = I (x) P_a`` for strong blocks.

    With ``|1>`` as spin up, ``S_x = 2 s_x`` but ``S_y = -2 s_y`` and
    ``S_z = -2 s_z``; for ``J = 1/2`` this gives ``(sx, -sy, -sz)``.
    """
    j = spin_matrices(twoJ)
    return {"x": 2 * j["x"], "y": -2 * j["y"], "z": -2 * j["z"]}


def singlet_product_state(n: int) -> np.ndarray:
    if n % 2 or n < 2:
        raise ValueError("singlet product needs an even, positive n")
    check_dim(2**n)
    singlet = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
    out = np.ones(1, dtype=complex)
    for _ in range(n // 2):
        out = np.kron(out, singlet)
    return out


def block(model: str, n: int, label: int) -> DfsBlock:
    if model == WEAK:
        return wcd_basis(n, label)
    if model == STRONG:
        return scd_full_basis(n, label)
    raise ValueError(f"unknown model {model!r}")


def blocks(model: str, n: int) -> list[DfsBlock]:
    labels = weak_labels(n) if model == WEAK else strong_labels(n)
    return [block(model, n, lab) for lab in labels]


def check_label(model: str, n: int, label: int) -> None:
    if model == WEAK:
        check_weak_label(n, label)
    elif model == STRONG:
        check_strong_label(n, label)
    else:
        raise ValueError(f"unknown model {model!r}")


# -- two-deep maximal states --------------------------------------------------

TWO_DEEP_TAILS = {"TT": (-1, -1), "BT": (1, -1), "TB": (-1, 1), "BB": (1, 1)}


def _grandparent(n: int, twoJ: int, kind: str, prefix=None) -> tuple[int, ...]:
    tail = TWO_DEEP_TAILS[kind]
    two_gp = twoJ - sum(tail)
    if n < 3 or two_gp < 0 or two_gp > n - 2 or (two_gp == 0 and tail[0] == -1):
        raise BoundaryError(f"no {kind} state for n={n}, 2J={twoJ}")
    if prefix is not None:
        prefix = tuple(prefix)
        if len(prefix) != n - 2 or not is_scd_path(prefix) or sum(prefix) != two_gp:
            raise BoundaryError(f"prefix {prefix} does not lead to 2J={two_gp} at n-2")
        return prefix
    return scd_paths(n - 2, two_gp)[0]


def two_deep_states(n: int, twoJ: int, kinds=("TT", "BT", "TB", "BB"), prefixes=None) -> dict[str, np.ndarray]:
    """Maximal-``m_J`` TT, BT, TB, BB states from the closed-form two-qubit extension.

    Each state is assembled from the ``(n-2)``-qubit grandparent ladder states and
    the explicit coefficients, not by running the one-step recursion twice.
    ``prefixes`` optionally maps a kind to its grandparent path.
    """
    check_strong_label(n, twoJ)
    J = twoJ / 2
    prefixes = prefixes or {}
    up, dn = np.array([0, 1], dtype=complex), np.array([1, 0], dtype=complex)

    def tail(a, b):
        return np.kron(a, b)

    out = {}
    for kind in kinds:
        gp = _grandparent(n, twoJ, kind, prefixes.get(kind))
        two_gp = sum(gp)
        ladder = spin_ladder(scd_maximal_state(gp), n - 2, two_gp)
        if kind == "TT":
            # grandparent J+1: m = J+1, J, J-1 -> ladder[0], [1], [2]
            c0 = math.sqrt((2 * J + 1) / (2 * J + 3))
            c1 = -math.sqrt((2 * J + 1) / ((2 * J + 2) * (2 * J + 3)))
            c2 = math.sqrt(2 / ((2 * J + 2) * (2 * J + 3)))
            psi = c0 * np.kron(ladder[0], tail(dn, dn)) + c1 * np.kron(ladder[1], tail(up, dn) + tail(dn, up))
            psi = psi + c2 * np.kron(ladder[2], tail(up, up))
        elif kind == "BT":
            c0 = -math.sqrt((2 * J + 1) / (2 * J + 2))
            c1 = 1 / math.sqrt((2 * J + 2) * (2 * J + 1))
            psi = c0 * np.kron(ladder[0], tail(up, dn)) + c1 * np.kron(ladder[0], tail(dn, up))
            if twoJ > 0:
                c2 = math.sqrt(2 * J / ((2 * J + 1) * (2 * J + 2)))
                psi = psi + c2 * np.kron(ladder[1], tail(up, up))
        elif kind == "TB":
            c0 = -math.sqrt(2 * J / (2 * J + 1))
            c1 = 1 / math.sqrt(2 * J + 1)
            psi = c0 * np.kron(ladder[0], tail(dn, up)) + c1 * np.kron(ladder[1], tail(up, up))
        else:
            psi = np.kron(ladder[0], tail(up, up))
        out[kind] = psi
    return out


def two_deep_kind(path) -> str:
    last = tuple(path[-2:])
    return {v: k for k, v in TWO_DEEP_TAILS.items()}[last]


# -- counting oracles -------------------------------------------------------------

def count_scd_paths(n: int, twoJ: int) -> int:
    """Number of non-negative +-1/2 walks, by dynamic programming."""
    counts = {1: 1}
    for _ in range(n - 1):
        nxt: dict[int, int] = {}
        for level, c in counts.items():
            for step in (1, -1):
                if level + step >= 0:
                    nxt[level + step] = nxt.get(level + step, 0) + c
        counts = nxt
    return counts.get(twoJ, 0)


# -- coupled reference states --------------------------------------------------

def coupled_reference_states(n: int) -> dict[tuple[int, int], np.ndarray]:
    """Hand-expanded coupled states keyed by ``(lambda, 2m)``.

    ``n = 3``: the four ``J = 1/2`` states (singlet or triplet on qubits 1, 2
    coupled to qubit 3).  ``n = 4``: the two ``J = 0`` states (singlet pair
    product, and triplet pairs coupled to zero).
    """
    from .linalg import ket

    if n == 3:
        r2, r6 = math.sqrt(2), math.sqrt(6)
        return {
            (0, -1): ket({"010": 1, "100": -1}) / r2,
            (0, 1): ket({"011": 1, "101": -1}) / r2,
            (1, -1): ket({"001": -2, "010": 1, "100": 1}) / r6,
            (1, 1): ket({"110": 2, "101": -1, "011": -1}) / r6,
        }
    if n == 4:
        return {
            (0, 0): ket({"0101": 1, "0110": -1, "1001": -1, "1010": 1}) / 2,
            (1, 0): ket({"0011": 2, "1100": 2, "0101": -1, "1010": -1, "0110": -1, "1001": -1}) / math.sqrt(12),
        }
    raise ValueError("reference states exist for n = 3 and n = 4 only")


def reference_phases(blk: DfsBlock, refs: dict[tuple[int, int], np.ndarray], tol: float = 1e-10) -> np.ndarray:
    """Per-``lambda`` phases ``p`` with ``ref = p * column``; raises if a column differs by more than a phase."""
    phases = np.zeros(blk.n_J, dtype=complex)
    for (lam, two_m), ref in refs.items():
        col = blk.column(lam, (blk.twoJ - two_m) // 2)
        p = np.vdot(col, ref)
        if abs(abs(p) - 1) > tol or np.max(np.abs(ref - p * col)) > tol:
            raise ValueError(f"column (lambda={lam}, 2m={two_m}) is not a rephased reference state")
        if phases[lam] != 0 and abs(phases[lam] - p) > tol:
            raise ValueError(f"inconsistent phases within lambda={lam}")
        phases[lam] = p
    return phases

"""System operators on n qubits as full-space matrices.

Qubit 1 is the most significant bit of the computational-basis index, so
``|q1 q2 ... qn>`` has index ``int("q1q2...qn", 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, check_dim, commutator, max_abs

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
AXES = ("x", "y", "z")

KINDS = ("sigma", "collective", "partial_sq", "exchange", "t_family", "heisenberg")


class InvalidIndexError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Named operator on ``n`` qubits.

    ``params`` depends on ``kind``:

    * ``sigma``: ``axis``, ``site``
    * ``collective``: ``axis``
    * ``partial_sq``: ``k``
    * ``exchange``: ``i``, ``j``
    * ``t_family``: ``i``, ``j``, ``z`` (four reals), ``h`` (complex)
    * ``heisenberg``: ``eps`` (length n), ``J`` (n x n symmetric)
    """

    kind: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.n < 1:
            raise InvalidIndexError("n must be >= 1")
        p = self.params
        if self.kind in ("sigma", "collective") and p.get("axis") not in AXES:
            raise ValueError(f"axis must be one of {AXES}")
        if self.kind == "sigma":
            self._site(p.get("site"))
        if self.kind == "partial_sq" and not 1 <= int(p.get("k", 0)) <= self.n:
            raise InvalidIndexError(f"k must lie in [1, {self.n}]")
        if self.kind in ("exchange", "t_family"):
            i, j = self._site(p.get("i")), self._site(p.get("j"))
            if i == j:
                raise InvalidIndexError("two-qubit operator needs i != j")
        if self.kind == "t_family":
            z = p.get("z")
            if z is None or len(z) != 4:
                raise ValueError("t_family needs four diagonal entries z")
            if any(isinstance(x, complex) and x.imag != 0 for x in z):
                raise ValueError("t_family diagonal entries must be real")
        if self.kind == "heisenberg":
            eps = np.asarray(p.get("eps", np.zeros(self.n)), dtype=float)
            J = np.asarray(p.get("J", np.zeros((self.n, self.n))), dtype=float)
            if eps.shape != (self.n,) or J.shape != (self.n, self.n):
                raise ValueError("heisenberg needs eps of length n and an n x n J")
            if not np.allclose(J, J.T):
                raise ValueError("heisenberg coupling matrix must be symmetric")

    def _site(self, s) -> int:
        if s is None or not 1 <= int(s) <= self.n:
            raise InvalidIndexError(f"qubit index {s!r} outside [1, {self.n}]")
        return int(s)

    def key(self) -> tuple:
        """Hashable identity including parameters (for caching and JSON round trips)."""
        return (self.kind, self.n, _freeze(self.params))

    def __eq__(self, other):
        return isinstance(other, OperatorSpec) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        for name, val in self.params.items():
            if name == "h":
                val = [complex(val).real, complex(val).imag]
            elif isinstance(val, np.ndarray):
                val = val.tolist()
            out[name] = val
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "OperatorSpec":
        obj = dict(obj)
        kind, n = obj.pop("kind"), int(obj.pop("n"))
        if "h" in obj and isinstance(obj["h"], list):
            obj["h"] = complex(*obj["h"])
        return cls(kind, n, obj)

    def label(self) -> str:
        p = self.params
        if self.kind == "sigma":
            return f"sigma_{p['axis']}{p['site']}"
        if self.kind == "collective":
            return f"S_{p['axis']}"
        if self.kind == "partial_sq":
            return f"s2_{p['k']}"
        if self.kind == "exchange":
            return f"E{p['i']}{p['j']}"
        if self.kind == "t_family":
            return f"T{p['i']}{p['j']}{tuple(p['z'])}"
        return "H_heis"


def _freeze(obj):
    if isinstance(obj, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in obj.items()))
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return tuple(_freeze(v) for v in obj)
    return obj


# -- convenience constructors ------------------------------------------------

def sigma(axis: str, site: int, n: int) -> OperatorSpec:
    return OperatorSpec("sigma", n, {"axis": axis, "site": site})


def collective(axis: str, n: int) -> OperatorSpec:
    return OperatorSpec("collective", n, {"axis": axis})


def partial_sq(k: int, n: int) -> OperatorSpec:
    return OperatorSpec("partial_sq", n, {"k": k})


def exchange(i: int, j: int, n: int) -> OperatorSpec:
    return OperatorSpec("exchange", n, {"i": i, "j": j})


def t_family(i: int, j: int, z, h: complex, n: int) -> OperatorSpec:
    if any(complex(x).imag != 0 for x in z):
        raise ValueError("t_family diagonal entries must be real")
    return OperatorSpec("t_family", n, {"i": i, "j": j, "z": tuple(float(complex(x).real) for x in z), "h": complex(h)})


def heisenberg(eps, J, n: int) -> OperatorSpec:
    return OperatorSpec("heisenberg", n, {"eps": tuple(float(e) for e in eps),
                                          "J": tuple(tuple(float(x) for x in row) for row in J)})


def t_p(i: int, j: int, n: int) -> OperatorSpec:
    """Phase on ``|00>`` of qubits i, j."""
    return t_family(i, j, (1, 0, 0, 0), 0, n)


def t_q(i: int, j: int, n: int) -> OperatorSpec:
    """Phase on ``|11>`` of qubits i, j."""
    return t_family(i, j, (0, 0, 0, 1), 0, n)


def a_bar(i: int, j: int, n: int) -> OperatorSpec:
    """Phase on ``|10>`` of qubits i, j: ``T_ij(0, 0, 1, 0, 0)``."""
    return t_family(i, j, (0, 0, 1, 0), 0, n)


# -- embedding ---------------------------------------------------------------

def _bit(idx: np.ndarray, q: int, n: int) -> np.ndarray:
    return (idx >> (n - q)) & 1


def embed(op, sites, n: int) -> np.ndarray:
    """Embed a ``2^k x 2^k`` operator acting on ``sites`` (1-based) into n qubits."""
    op = np.asarray(op, dtype=complex)
    sites = [int(s) for s in sites]
    k = len(sites)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} sites")
    if len(set(sites)) != k or any(not 1 <= s <= n for s in sites):
        raise InvalidIndexError(f"bad sites {sites} for n={n}")
    dim = 2**n
    check_dim(dim)
    idx = np.arange(dim)
    local = np.zeros(dim, dtype=int)
    cleared = idx.copy()
    for s in sites:
        b = _bit(idx, s, n)
        local = (local << 1) | b
        cleared = cleared & ~(1 << (n - s))
    out = np.zeros((dim, dim), dtype=complex)
    for a in range(2**k):
        target = cleared.copy()
        for pos, s in enumerate(sites):
            if (a >> (k - 1 - pos)) & 1:
                target |= 1 << (n - s)
        out[target, idx] += op[a, local]
    return out


def sigma_matrix(axis: str, site: int, n: int) -> np.ndarray:
    return embed(PAULI[axis], [site], n)


def collective_matrix(axis: str, n: int, k: int | None = None) -> np.ndarray:
    """``S_axis`` summed over qubits ``1..k`` (all qubits by default)."""
    k = n if k is None else k
    return sum(sigma_matrix(axis, q, n) for q in range(1, k + 1))


SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def build(spec: OperatorSpec) -> np.ndarray:
    n, p = spec.n, spec.params
    check_dim(2**n)
    if spec.kind == "sigma":
        return sigma_matrix(p["axis"], int(p["site"]), n)
    if spec.kind == "collective":
        return collective_matrix(p["axis"], n)
    if spec.kind == "partial_sq":
        # (s^k)^2 with s = S/2: eigenvalue J_k(J_k+1)
        k = int(p["k"])
        return 0.25 * sum(np.linalg.matrix_power(collective_matrix(a, n, k), 2) for a in AXES)
    if spec.kind == "exchange":
        return embed(SWAP, [p["i"], p["j"]], n)
    if spec.kind == "t_family":
        z1, z2, z3, z4 = (float(x) for x in p["z"])
        h = complex(p["h"])
        t = np.array([[z1, 0, 0, 0], [0, z2, h, 0], [0, np.conj(h), z3, 0], [0, 0, 0, z4]], dtype=complex)
        return embed(t, [p["i"], p["j"]], n)
    if spec.kind == "heisenberg":
        eps = np.asarray(p["eps"], dtype=float)
        J = np.asarray(p["J"], dtype=float)
        dim = 2**n
        out = np.zeros((dim, dim), dtype=complex)
        for j in range(n):
            if eps[j]:
                out += eps[j] * sigma_matrix("z", j + 1, n)
        dot = np.kron(SIGMA_X, SIGMA_X) + np.kron(SIGMA_Y, SIGMA_Y) + np.kron(SIGMA_Z, SIGMA_Z)
        for i in range(n):
            for j in range(n):
                if J[i, j] == 0:
                    continue
                if i == j:
                    out += 0.5 * J[i, i] * 3 * np.eye(dim)
                else:
                    out += 0.5 * J[i, j] * embed(dot, [i + 1, j + 1], n)
        return out
    raise ValueError(spec.kind)


def partial_collective_sq(k: int, n: int) -> np.ndarray:
    """``(S^k)^2 = sum_a (S_a^k)^2`` with the Pauli normalisation (4x ``partial_sq``)."""
    return 4.0 * build(partial_sq(k, n))


def check_commuting_family(n: int, tol: float = 1e-10) -> dict:
    """Largest ``||[(S^k)^2, (S^l)^2]||_max`` over all ``k, l <= n``."""
    mats = [partial_collective_sq(k, n) for k in range(1, n + 1)]
    worst = 0.0
    for a, b in combinations(range(n), 2):
        worst = max(worst, max_abs(commutator(mats[a], mats[b])))
    return {"check": "commuting_family", "n": n, "worst_deviation": worst, "pass": worst <= tol}


def check_heisenberg_preserves_wcd(n: int, eps, J, tol: float = 1e-10) -> dict:
    h = build(heisenberg(eps, J, n))
    dev = max_abs(commutator(h, collective_matrix("z", n)))
    return {"check": "heisenberg_preserves_wcd", "n": n, "worst_deviation": dev, "pass": dev <= tol}


def exchanges(n: int, nearest_neighbor: bool = True) -> list[OperatorSpec]:
    if nearest_neighbor:
        return [exchange(i, i + 1, n) for i in range(1, n)]
    return [exchange(i, j, n) for i, j in combinations(range(1, n + 1), 2)]


def weak_generators(n: int) -> list[OperatorSpec]:
    """``{E_{i,i+1}, T^P_{i,i+1}, T^Q_{i,i+1}} + {T_12(0,0,1,0,0)}``."""
    out: list[OperatorSpec] = []
    for i in range(1, n):
        out += [exchange(i, i + 1, n), t_p(i, i + 1, n), t_q(i, i + 1, n)]
    if n >= 2:
        out.append(a_bar(1, 2, n))
    return out

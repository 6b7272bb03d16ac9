"""Pulse schedules from product formulas.

A pulse ``(name, t)`` applies ``exp(i t H_name)``; durations may be negative
(running a Hamiltonian with flipped sign).  Steps are listed in time order, so
the schedule ``[p1, p2, ...]`` realizes ``... U2 U1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lie import LieBasis, lie_closure, restrict
from .linalg import (NotUnitaryError, SIGMA_X, SIGMA_Z, dagger, expi, is_unitary, mat_exp,
                     matrix_log_unitary, max_abs, trace_distance)
from .operators import OperatorSpec, build

DEFAULT_STEP_CAP = 2**20


class CompileError(RuntimeError):
    def __init__(self, msg, best_error=None, length=None):
        super().__init__(msg)
        self.best_error = best_error
        self.length = length


def phase_aligned_distance(u, v) -> float:
    """``sqrt(1 - |Tr(U^dag V)| / d)``: trace distance after the best global phase on ``V``."""
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    ov = np.trace(dagger(u) @ v)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return trace_distance(u, v / phase)


METRICS = {"trace": trace_distance, "phase": phase_aligned_distance}


@dataclass(frozen=True)
class Primitive:
    """Named Hamiltonian ``sum_k c_k O_k`` switched on as one unit."""

    name: str
    terms: tuple

    @classmethod
    def of(cls, spec: OperatorSpec, name: str | None = None) -> "Primitive":
        return cls(name or spec.label(), ((1.0, spec),))

    def matrix(self) -> np.ndarray:
        return sum(c * build(s) for c, s in self.terms)

    def to_json(self) -> dict:
        return {"name": self.name, "terms": [{"coef": c, "op": s.to_json()} for c, s in self.terms]}


@dataclass
class PulseSequence:
    steps: list[tuple[str, float]]
    target: np.ndarray
    achieved_error: float
    library: dict[str, np.ndarray] = field(repr=False)
    metric: str = "trace"

    @property
    def length(self) -> int:
        return len(self.steps)

    def unitary(self) -> np.ndarray:
        return replay(self.steps, self.library)

    def replay_error(self) -> float:
        return METRICS[self.metric](self.target, self.unitary())

    def to_json(self) -> dict:
        return {"steps": [{"primitive": n, "duration": t} for n, t in self.steps],
                "achieved_error": self.achieved_error, "length": self.length, "metric": self.metric}


def replay(steps, library: dict[str, np.ndarray]) -> np.ndarray:
    dim = next(iter(library.values())).shape[0]
    cache: dict[tuple[str, float], np.ndarray] = {}
    u = np.eye(dim, dtype=complex)
    for name, t in steps:
        key = (name, t)
        if key not in cache:
            cache[key] = expi(library[name], t)
        u = cache[key] @ u
    return u


def merge_steps(steps) -> list[tuple[str, float]]:
    """Fuse neighbouring pulses of one Hamiltonian and drop zero durations."""
    out: list[list] = []
    for name, t in steps:
        if out and out[-1][0] == name:
            out[-1][1] += t
        else:
            out.append([name, t])
        if out and out[-1][1] == 0.0:
            out.pop()
    return [(n, float(t)) for n, t in out]


def _finish(steps, target, library, metric="trace") -> PulseSequence:
    seq = PulseSequence(list(steps), np.asarray(target, dtype=complex), 0.0, library, metric)
    seq.achieved_error = seq.replay_error()
    return seq


# -- composition laws --------------------------------------------------------------

def trotter_compose(terms, library: dict[str, np.ndarray], n_steps: int) -> PulseSequence:
    """``exp(i sum_k t_k H_k)`` as ``n_steps`` cycles of ``(H_k, t_k / n_steps)``."""
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    terms = [(name, float(t)) for name, t in terms]
    total = sum(t * library[name] for name, t in terms)
    target = expi(total)
    cycle = [(name, t / n_steps) for name, t in terms]
    return _finish(merge_steps(cycle * n_steps), target, library)


def commutator_cycle(name_i: str, name_j: str, s: float) -> list[tuple[str, float]]:
    """Four pulses ``H_i, H_j, H_i, H_j`` with durations ``a, b, -a, -b`` and ``a b = s``.

    Their product is ``exp(s [H_i, H_j] + O(|s|^{3/2}))``.
    """
    a = math.sqrt(abs(s))
    b = math.copysign(a, s)
    return [(name_i, a), (name_j, b), (name_i, -a), (name_j, -b)]


def commutator_compose(name_i: str, name_j: str, t: float, library: dict[str, np.ndarray], n_steps: int) -> PulseSequence:
    """``exp(t [H_i, H_j])`` from ``n_steps`` group-commutator cycles."""
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    hi, hj = library[name_i], library[name_j]
    target = mat_exp(t * (hi @ hj - hj @ hi))
    cycle = commutator_cycle(name_i, name_j, t / n_steps)
    return _finish(merge_steps(cycle * n_steps), target, library)


def faulty_gate_distance(h, phi: float, dphi: float, tol: float = 1e-10) -> float:
    """Trace distance between ``exp(i phi H)`` and ``exp(i (phi + dphi) H)`` for involutive ``H``."""
    h = np.asarray(h, dtype=complex)
    if max_abs(h @ h - np.eye(h.shape[0])) > tol:
        raise ValueError("H must square to the identity")
    return trace_distance(expi(h, phi), expi(h, phi + dphi))


def faulty_gate_analytic(dphi: float) -> float:
    """``sqrt(1 - cos(dphi))`` for traceless ``H``, i.e. ``sqrt2 |sin(dphi / 2)|``."""
    return math.sqrt(2.0) * abs(math.sin(dphi / 2))


# -- Euler angles ------------------------------------------------------------------------

def _axis_sign(gen, pauli, label, tol=1e-9) -> int:
    gen = np.asarray(gen, dtype=complex)
    s = np.real(np.trace(gen @ pauli)) / 2
    sign = 1 if s > 0 else -1
    if max_abs(gen - sign * pauli) > tol:
        raise ValueError(f"{label} generator does not act as +-{label} on the encoded pair")
    return sign


def euler_angles(u) -> tuple[float, float, float]:
    """``(alpha, beta, gamma)`` with ``U = exp(i alpha Z) exp(i beta X) exp(i gamma Z)``."""
    a, b = u[0, 0], u[0, 1]
    beta = math.atan2(abs(b), abs(a))
    if abs(b) < 1e-14:
        return float(np.angle(a)), 0.0, 0.0
    if abs(a) < 1e-14:
        return float(np.angle(b) - math.pi / 2), beta, 0.0
    plus, minus = float(np.angle(a)), float(np.angle(b) - math.pi / 2)
    return (plus + minus) / 2, beta, (plus - minus) / 2


def euler_su2(target, xgen, zgen, names=("X", "Z"), tol: float = 1e-9) -> PulseSequence:
    """At most three rotations ``Z(alpha) X(beta) Z(gamma)`` realizing an SU(2) target.

    ``xgen``/``zgen`` are the 2x2 encoded actions of the two Hamiltonians, which
    must equal ``+-sigma_x`` and ``+-sigma_z``.
    """
    u = np.asarray(target, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u, tol) or abs(np.linalg.det(u) - 1) > tol:
        raise NotUnitaryError("target must be a 2x2 special unitary")
    sx = _axis_sign(xgen, SIGMA_X, "sigma_x")
    sz = _axis_sign(zgen, SIGMA_Z, "sigma_z")
    alpha, beta, gamma = euler_angles(u)
    xn, zn = names
    steps = [(zn, sz * gamma), (xn, sx * beta), (zn, sz * alpha)]
    steps = [(n, t) for n, t in steps if abs(t) > 1e-15]
    library = {xn: np.asarray(xgen, dtype=complex), zn: np.asarray(zgen, dtype=complex)}
    return _finish(merge_steps(steps), u, library)


# -- compile ---------------------------------------------------------------------------

def _expand(lb: LieBasis, k: int, memo: dict) -> dict:
    """Element ``e_k`` as ``{atom: weight}`` over generator atoms ``("g", i)`` and brackets ``("c", A, B)``."""
    if k in memo:
        return memo[k]
    out: dict = {}
    for m in range(k + 1):
        w = lb.coeffs[k, m]
        if w == 0.0:
            continue
        for atom, v in _raw_atoms(lb, m, memo).items():
            out[atom] = out.get(atom, 0.0) + w * v
    memo[k] = out
    return out


def _raw_atoms(lb: LieBasis, m: int, memo: dict) -> dict:
    origin = lb.origins[m]
    if origin[0] == "gen":
        return {("g", origin[1]): 1.0}
    _, a, b = origin
    left, right = _expand(lb, a, memo), _expand(lb, b, memo)
    out: dict = {}
    for x, wx in left.items():
        for y, wy in right.items():
            if x == y:
                continue
            if repr(x) <= repr(y):
                atom, w = ("c", x, y), wx * wy
            else:
                atom, w = ("c", y, x), -wx * wy
            out[atom] = out.get(atom, 0.0) + w
    return out


def atom_value(atom, gens) -> np.ndarray:
    if atom[0] == "g":
        return gens[atom[1]]
    a, b = atom_value(atom[1], gens), atom_value(atom[2], gens)
    return a @ b - b @ a


def realize_atom(atom, s: float, names) -> list[tuple[str, float]]:
    """Pulses approximating ``exp(s * atom)`` for an anti-Hermitian atom.

    A generator atom ``a_g = i h_g`` is one pulse.  A bracket ``[A, B]`` uses
    the cycle pair ``C(p, q) C(-p, -q)`` with ``p q = -s / 2``; the pair cancels
    the third-order terms of a single cycle.
    """
    if atom[0] == "g":
        return [(names[atom[1]], s)]
    a = math.sqrt(abs(s) / 2)
    p, q = a, -math.copysign(a, s)
    out = []
    for sign in (1, -1):
        pa, qb = sign * p, sign * q
        out += realize_atom(atom[1], pa, names)
        out += realize_atom(atom[2], qb, names)
        out += realize_atom(atom[1], -pa, names)
        out += realize_atom(atom[2], -qb, names)
    return out


@dataclass
class CompileResult:
    sequence: PulseSequence
    n_trotter: int
    atoms: int
    leakage: float | None


def compile_unitary(target, blk, primitives, epsilon: float = 1e-3, step_cap: int = DEFAULT_STEP_CAP,
                    check_leakage: bool = True, tol: float = 1e-8) -> CompileResult:
    """Pulse schedule whose action on ``blk`` matches ``target`` to ``epsilon``.

    The target acts on the block's lambda factor (``n_J x n_J``).  Its principal
    logarithm is expanded in the Lie closure of the primitives restricted to
    the block, each closure element is unrolled into generator atoms and
    nested brackets, and the resulting sum is Trotterized with the number of
    steps doubled until the phase-aligned trace distance is within
    ``epsilon``.  The block's global phase is not tracked.
    """
    target = np.asarray(target, dtype=complex)
    if target.shape != (blk.n_J, blk.n_J) or not is_unitary(target):
        raise NotUnitaryError(f"target must be a {blk.n_J}x{blk.n_J} unitary")
    primitives = list(primitives)
    names = [p.name for p in primitives]
    full = {p.name: p.matrix() for p in primitives}
    restricted = [restrict(full[p.name], [blk], name=p.name) for p in primitives]
    library = {p.name: r[blk.label] for p, r in zip(primitives, restricted)}
    m = blk.n_J
    if m == 1:
        seq = _finish([], target, library, "phase")
        return CompileResult(seq, 0, 0, 0.0)

    lb = lie_closure(restricted, tol)
    h = matrix_log_unitary(target)
    x = 1j * (h - np.trace(h) / m * np.eye(m))
    if lb.residual((x,)) > 1e-8:
        raise CompileError("target generator lies outside the closure of the primitives")
    coords = lb.coordinates((x,))
    memo: dict = {}
    weights: dict = {}
    for k, c in enumerate(coords):
        if abs(c) < 1e-14:
            continue
        for atom, w in _expand(lb, k, memo).items():
            weights[atom] = weights.get(atom, 0.0) + c * w
    gens = [1j * (library[n] - np.trace(library[n]) / m * np.eye(m)) for n in names]
    scale = max(abs(w) for w in weights.values()) if weights else 0.0
    atoms = [(a, w) for a, w in weights.items() if abs(w) > 1e-13 * max(scale, 1.0)]
    recon = sum((w * atom_value(a, gens) for a, w in atoms), np.zeros((m, m), dtype=complex))
    if max_abs(recon - x) > 1e-8:
        raise CompileError("closure expansion failed to reproduce the target generator")

    best = (np.inf, None)
    n = 1
    while True:
        step = merge_steps([p for a, w in atoms for p in realize_atom(a, w / n, names)])
        if len(step) * n > step_cap:
            raise CompileError(f"epsilon={epsilon} not reached within {step_cap} pulses",
                               best_error=best[0], length=best[1])
        one = replay(step, library)
        err = phase_aligned_distance(target, np.linalg.matrix_power(one, n))
        if err < best[0]:
            best = (err, len(step) * n)
        if err <= epsilon:
            break
        n *= 2
    seq = _finish(merge_steps(step * n), target, library, "phase")
    if seq.achieved_error > epsilon:
        raise CompileError("replayed error exceeds epsilon", best_error=seq.achieved_error, length=seq.length)
    leak = prefix_leakage(seq.steps, full, blk) if check_leakage else None
    return CompileResult(seq, n, len(atoms), leak)


def prefix_leakage(steps, full_library: dict[str, np.ndarray], blk) -> float:
    """Max ``||(I - P) U_k P||`` over every prefix product ``U_k`` on the full space."""
    b = blk.basis
    cache: dict = {}
    u = np.eye(b.shape[0], dtype=complex)
    worst = 0.0
    for name, t in steps:
        key = (name, t)
        if key not in cache:
            cache[key] = expi(full_library[name], t)
        u = cache[key] @ u
        ub = u @ b
        worst = max(worst, max_abs(ub - b @ (dagger(b) @ ub)))
    return worst


def length_table(target, blk, primitives, epsilons) -> list[dict]:
    rows = []
    for eps in epsilons:
        try:
            res = compile_unitary(target, blk, primitives, eps, check_leakage=False)
            rows.append({"epsilon": eps, "length": res.sequence.length,
                         "achieved_error": res.sequence.achieved_error, "reached": True})
        except CompileError as err:
            rows.append({"epsilon": eps, "length": err.length, "achieved_error": err.best_error, "reached": False})
    return rows


def exchange_primitives(n: int, pairs=None) -> list[Primitive]:
    from .operators import exchange, exchanges

    specs = [exchange(i, j, n) for i, j in pairs] if pairs else exchanges(n)
    return [Primitive.of(s) for s in specs]

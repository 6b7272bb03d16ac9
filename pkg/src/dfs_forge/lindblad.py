"""Markovian master equation with general coupling operators, fixed-step RK4."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .linalg import DimensionError, dagger, max_abs

log = logging.getLogger(__name__)

A_EIGEN_FLOOR = -1e-12
TRACE_TOL = 1e-8
HERM_TOL = 1e-10
EIG_FLOOR = -1e-6


class IntegrationError(ArithmeticError):
    """A density-matrix invariant broke during integration (usually dt too large)."""


@dataclass
class LindbladModel:
    f_ops: list
    a: np.ndarray
    h_s: np.ndarray | None = None

    def __post_init__(self):
        self.f_ops = [np.asarray(f, dtype=complex) for f in self.f_ops]
        self.a = np.atleast_2d(np.asarray(self.a, dtype=complex))
        k = len(self.f_ops)
        if self.a.shape != (k, k):
            raise DimensionError(f"coefficient matrix must be {k}x{k}, got {self.a.shape}")
        if k:
            dims = {f.shape for f in self.f_ops}
            if len(dims) != 1 or next(iter(dims))[0] != next(iter(dims))[1]:
                raise DimensionError("coupling operators must be square with equal shapes")
            dim = self.f_ops[0].shape[0]
        else:
            dim = None
        if self.h_s is not None:
            self.h_s = np.asarray(self.h_s, dtype=complex)
            if dim is not None and self.h_s.shape != (dim, dim):
                raise DimensionError("H_S does not match the coupling operators")
            if max_abs(self.h_s - dagger(self.h_s)) > HERM_TOL:
                raise ValueError("H_S must be Hermitian")
        if k:
            if max_abs(self.a - dagger(self.a)) > 1e-12:
                raise ValueError("coefficient matrix must be Hermitian")
            if np.min(np.linalg.eigvalsh(self.a)) < A_EIGEN_FLOOR:
                raise ValueError("coefficient matrix must be positive semidefinite")

    @property
    def dim(self) -> int:
        if self.f_ops:
            return self.f_ops[0].shape[0]
        if self.h_s is not None:
            return self.h_s.shape[0]
        raise DimensionError("model has no operators")


def lindblad_rhs(model: LindbladModel, rho) -> np.ndarray:
    """``-i[H_S, rho] + 1/2 sum a_ab ([F_a, rho F_b^dag] + [F_a rho, F_b^dag])``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (model.dim, model.dim):
        raise DimensionError(f"rho has shape {rho.shape}, model acts on {model.dim}")
    out = np.zeros_like(rho)
    if model.h_s is not None:
        out += -1j * (model.h_s @ rho - rho @ model.h_s)
    for al, fa in enumerate(model.f_ops):
        for be, fb in enumerate(model.f_ops):
            c = model.a[al, be]
            if c == 0:
                continue
            fbd = dagger(fb)
            r_fbd = rho @ fbd
            fa_r = fa @ rho
            out += 0.5 * c * ((fa @ r_fbd - r_fbd @ fa) + (fa_r @ fbd - fbd @ fa_r))
    return out


def check_density(rho, trace_ref: float = 1.0) -> None:
    if max_abs(rho - dagger(rho)) > HERM_TOL:
        raise IntegrationError("density matrix lost Hermiticity")
    if abs(np.trace(rho).real - trace_ref) > TRACE_TOL:
        raise IntegrationError("trace drifted beyond tolerance")
    if np.min(np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))) < EIG_FLOOR:
        raise IntegrationError("density matrix became non-positive")


@dataclass
class Trajectory:
    times: np.ndarray
    states: list = field(repr=False)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def evolve(model: LindbladModel, rho0, T: float, dt: float = 1e-3, check: bool = True) -> Trajectory:
    """Classical RK4 with ``round(T / dt)`` steps; samples after every step."""
    if dt <= 0 or T < dt:
        raise ValueError("need dt > 0 and T >= dt")
    rho = np.asarray(rho0, dtype=complex)
    tr0 = np.trace(rho).real
    steps = int(round(T / dt))
    times = [0.0]
    states = [rho]
    for k in range(steps):
        k1 = lindblad_rhs(model, rho)
        k2 = lindblad_rhs(model, rho + 0.5 * dt * k1)
        k3 = lindblad_rhs(model, rho + 0.5 * dt * k2)
        k4 = lindblad_rhs(model, rho + dt * k3)
        rho = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if check:
            try:
                check_density(rho, tr0)
            except IntegrationError as err:
                raise IntegrationError(f"{err} at t={(k + 1) * dt:.6g}") from None
        times.append((k + 1) * dt)
        states.append(rho)
    return Trajectory(np.array(times), states)


# -- block observables ------------------------------------------------------------

def _block_tensor(blk, rho) -> np.ndarray:
    r = dagger(blk.basis) @ np.asarray(rho, dtype=complex) @ blk.basis
    return r.reshape(blk.n_J, blk.d_J, blk.n_J, blk.d_J)


def block_population(blk, rho) -> float:
    return float(np.real(np.trace(dagger(blk.basis) @ rho @ blk.basis)))


def lambda_state(blk, rho) -> np.ndarray:
    """Block projection traced over the ``mu`` factor (not renormalised)."""
    return np.einsum("ajbj->ab", _block_tensor(blk, rho))


def mu_state(blk, rho) -> np.ndarray:
    return np.einsum("ajak->jk", _block_tensor(blk, rho))


def purity(rho) -> float:
    rho = np.asarray(rho)
    tr = np.trace(rho).real
    return float(np.real(np.trace(rho @ rho)) / tr**2)


def _psd_sqrt(m) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    return (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)


def fidelity(rho, ref) -> float:
    """``<psi|rho|psi>`` for a ket reference, Uhlmann fidelity for a matrix."""
    rho = np.asarray(rho, dtype=complex)
    ref = np.asarray(ref, dtype=complex)
    if ref.ndim == 1:
        return float(np.real(np.vdot(ref, rho @ ref)))
    s = _psd_sqrt(ref)
    inner = _psd_sqrt(s @ rho @ s)
    return float(np.real(np.trace(inner)) ** 2)


def subsystem_fidelity(blk, rho, rho_lambda_ref) -> float:
    """Fidelity of the block's lambda factor with a reference; leakage lowers it."""
    pop = block_population(blk, rho)
    if pop < 1e-6:
        log.warning("block population %.3g: state has left the block", pop)
    return fidelity(lambda_state(blk, rho), rho_lambda_ref)


def encode(blk, lam_state, mu_state_) -> np.ndarray:
    """``B (lambda (x) mu) B^dag`` for ket or matrix factors."""
    def as_dm(x):
        x = np.asarray(x, dtype=complex)
        return np.outer(x, x.conj()) if x.ndim == 1 else x

    inner = np.kron(as_dm(lam_state), as_dm(mu_state_))
    return blk.basis @ inner @ dagger(blk.basis)


@dataclass
class ContrastReport:
    times: np.ndarray
    protected: np.ndarray
    unprotected: np.ndarray
    passed: bool
    protected_floor: float = 1 - 1e-6
    unprotected_ceiling: float = 0.9

    def to_json(self) -> dict:
        return {"check": "contrast_run", "pass": self.passed,
                "protected_final": float(self.protected[-1]),
                "unprotected_final": float(self.unprotected[-1])}


def contrast_run(model: LindbladModel, protected_state, unprotected_state, T: float, dt: float = 1e-3,
                 blk=None, lambda_ref=None, sample_every: int = 1) -> ContrastReport:
    """Evolve a protected and an unprotected pure state side by side.

    The protected trace is the lambda-factor fidelity when ``blk`` and
    ``lambda_ref`` are given (subsystem encoding), otherwise the full-state
    fidelity; the unprotected trace is always the full-state fidelity.
    """
    def as_dm(x):
        x = np.asarray(x, dtype=complex)
        if x.ndim == 1:
            if abs(np.linalg.norm(x) - 1) > 1e-10:
                raise ValueError("states must be normalised")
            return np.outer(x, x.conj())
        return x

    p0, u0 = as_dm(protected_state), as_dm(unprotected_state)
    tp = evolve(model, p0, T, dt)
    tu = evolve(model, u0, T, dt)
    idx = list(range(0, len(tp.times), sample_every))
    if idx[-1] != len(tp.times) - 1:
        idx.append(len(tp.times) - 1)
    if blk is not None and lambda_ref is not None:
        fp = np.array([subsystem_fidelity(blk, tp.states[i], lambda_ref) for i in idx])
    else:
        fp = np.array([fidelity(tp.states[i], p0) for i in idx])
    fu = np.array([fidelity(tu.states[i], u0) for i in idx])
    ok = bool(fp[-1] >= 1 - 1e-6 and fu[-1] <= 0.9)
    return ContrastReport(tp.times[idx], fp, fu, ok)

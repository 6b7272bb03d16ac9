"""Dense complex linear-algebra primitives.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  States
are 1-d arrays.  Every routine here is a pure function of its inputs.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.linalg

DEFAULT_DIM_CAP = 2**12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


class ResourceLimitError(RuntimeError):
    """A requested matrix would exceed the configured dimension cap."""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class NotUnitaryError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


def dim_cap() -> int:
    """Full-space dimension cap; ``DFS_FORGE_DIM_CAP`` overrides the default."""
    raw = os.environ.get("DFS_FORGE_DIM_CAP")
    if raw is None:
        return DEFAULT_DIM_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"DFS_FORGE_DIM_CAP must be positive, got {raw!r}")
    return cap


def check_dim(dim: int) -> None:
    cap = dim_cap()
    if dim > cap:
        raise ResourceLimitError(f"dimension {dim} exceeds cap {cap}")


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a, name="matrix") -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def _same_shape(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return a, b


def kron(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    check_dim(a.shape[0] * b.shape[0])
    check_dim(a.shape[1] * b.shape[1])
    return np.kron(a, b)


def kron_all(factors) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = kron(out, f)
    return out


def commutator(a, b) -> np.ndarray:
    a, b = _same_shape(_square(a), _square(b))
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = _same_shape(_square(a), _square(b))
    return a @ b + b @ a


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def is_hermitian(a, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def is_unitary(u, tol: float = 1e-9) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))) <= tol)


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a), initial=0.0))


def mat_exp(a) -> np.ndarray:
    """Matrix exponential ``e^A``.

    If ``A`` is anti-Hermitian (``A = iH`` with ``H`` Hermitian) the result
    comes from an eigendecomposition of ``H`` and is unitary to machine
    precision; otherwise scipy's Pade-13 scaling-and-squaring is used.
    """
    a = _square(a)
    scale = max(1.0, max_abs(a))
    if max_abs(a + dagger(a)) <= 1e-14 * scale:
        h = -1j * a
        h = 0.5 * (h + dagger(h))
        w, v = np.linalg.eigh(h)
        return (v * np.exp(1j * w)) @ dagger(v)
    out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise ConvergenceError("matrix exponential did not converge")
    return out


def expi(h, t: float = 1.0) -> np.ndarray:
    """``exp(i t H)`` for Hermitian ``H``."""
    return mat_exp(1j * t * _square(h))


def trace_distance(u, v) -> float:
    """``sqrt(1 - Re Tr(U^dag V) / d)`` for unitaries.

    Evaluated as ``||U - V||_F / sqrt(2 d)``, which is identical for unitary
    arguments and avoids the cancellation in ``1 - Re Tr(...)`` near zero.
    """
    u, v = _same_shape(_square(u), _square(v))
    d = u.shape[0]
    return float(np.linalg.norm(u - v) / np.sqrt(2 * d))


def hs_inner(a, b) -> complex:
    a, b = _same_shape(a, b)
    return complex(np.vdot(a, b))


def hs_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def matrix_log_unitary(u, tol: float = 1e-9) -> np.ndarray:
    """Hermitian ``H`` with ``exp(iH) = U`` and eigenphases in ``(-pi, pi]``."""
    u = _square(u, "U")
    if not is_unitary(u, tol):
        raise NotUnitaryError("input is not unitary within tolerance")
    # complex Schur form of a normal matrix is diagonal
    t, z = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    phases = np.where(phases <= -np.pi, phases + 2 * np.pi, phases)
    h = (z * phases) @ dagger(z)
    return 0.5 * (h + dagger(h))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_special_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    u = random_unitary(d, rng)
    det = np.linalg.det(u)
    return u / det ** (1.0 / d)


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def basis_state(bits: str) -> np.ndarray:
    """Computational basis ket from a bitstring; qubit 1 is the leftmost bit."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def ket(amplitudes: dict[str, complex]) -> np.ndarray:
    """Sum of labelled basis kets, e.g. ``{"01": 1, "10": -1}`` (not normalized)."""
    n = len(next(iter(amplitudes)))
    v = np.zeros(2**n, dtype=complex)
    for bits, amp in amplitudes.items():
        v[int(bits, 2)] += amp
    return v

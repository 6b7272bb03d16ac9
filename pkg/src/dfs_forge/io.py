"""Shared JSON encoding: complex numbers as ``[re, im]``, matrices row-major."""

from __future__ import annotations

import json

import numpy as np


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise ValueError(f"not a complex number: {x!r}")


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        return [encode_complex(z) for z in m]
    return [[encode_complex(z) for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    """Row-major nested list of entries; each entry is ``[re, im]`` or a real."""
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValueError("matrix must be a non-empty list of rows")
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise ValueError("ragged or empty matrix rows")
    return np.array([[decode_complex(z) for z in row] for row in rows], dtype=complex)


def decode_vector(entries) -> np.ndarray:
    if not isinstance(entries, list) or not entries:
        raise ValueError("vector must be a non-empty list")
    return np.array([decode_complex(z) for z in entries], dtype=complex)


def _default(o):
    if isinstance(o, np.ndarray):
        return encode_matrix(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, (complex, np.complexfloating)):
        return encode_complex(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj, **kwargs) -> str:
    return json.dumps(obj, sort_keys=True, default=_default, **kwargs)

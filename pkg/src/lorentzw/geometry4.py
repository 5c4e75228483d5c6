"""Vectors of R^4_2: the flat metric of signature (+, +, -, -).

Vectors are plain numpy arrays whose last axis has length 4, so every
function here also works elementwise on stacks of vectors.
"""

import numpy as np

SIGNATURE = np.array([1.0, 1.0, -1.0, -1.0])
DEFAULT_TOL = 1e-10


def vec4(x1, x2=None, x3=None, x4=None):
    """Build a single Vec4, rejecting NaN and infinite coordinates.

    Accepts either four scalars or one length-4 sequence.
    """
    if x2 is None:
        arr = np.asarray(x1, dtype=float)
    else:
        arr = np.array([x1, x2, x3, x4], dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"Vec4 needs exactly 4 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"Vec4 coordinates must be finite, got {arr}")
    return arr


def inner(a, b):
    """Indefinite inner product a1*b1 + a2*b2 - a3*b3 - a4*b4."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3]
    return float(out) if np.ndim(out) == 0 else out


def norm_sq(a):
    return inner(a, a)


def euclidean_norm(a):
    a = np.asarray(a, dtype=float)
    out = np.sqrt(np.sum(a * a, axis=-1))
    return float(out) if np.ndim(out) == 0 else out


def is_null(v, tol=DEFAULT_TOL):
    """True iff |<v,v>| <= tol * max(1, |v|_E^2)."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    v = np.asarray(v, dtype=float)
    scale = np.maximum(1.0, np.sum(v * v, axis=-1))
    out = np.abs(inner(v, v)) <= tol * scale
    return bool(out) if np.ndim(out) == 0 else out


def causal_sign(v, tol=DEFAULT_TOL):
    """+1 for spacelike, -1 for timelike, 0 for null (same tolerance as is_null)."""
    if is_null(v, tol):
        return 0
    return 1 if inner(v, v) > 0 else -1


def normal_rank(w1, w2, tol=DEFAULT_TOL):
    """Rank of the 2x4 coordinate matrix [w1; w2].

    Uses complete pivoting with a threshold relative to the largest row
    magnitude. The coordinate rank is used on purpose: the Gram matrix in
    the indefinite metric is singular whenever a normal direction is null.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    m = np.array([np.asarray(w1, dtype=float), np.asarray(w2, dtype=float)])
    scale = max(np.linalg.norm(m[0]), np.linalg.norm(m[1]))
    if scale == 0.0:
        return 0
    i, j = np.unravel_index(np.argmax(np.abs(m)), m.shape)
    pivot = m[i, j]
    if abs(pivot) <= tol * scale:
        return 0
    other = m[1 - i] - (m[1 - i, j] / pivot) * m[i]
    if np.max(np.abs(other)) <= tol * scale:
        return 1
    return 2

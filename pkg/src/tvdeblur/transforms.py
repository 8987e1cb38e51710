"""Fast trigonometric transforms used to diagonalize structured blur operators.

Three one-dimensional transforms and their tensor-product (2D) extensions:

* ``DCT`` -- the orthogonal cosine matrix with entries
  ``C[i, j] = sqrt((2 - delta_{j0}) / n) * cos((2i + 1) j pi / (2n))``
  (0-based indices).  ``C`` is orthogonal but not symmetric, so forward and
  inverse applies differ (``C v`` vs ``C^T v``).
* ``DST1`` -- the type-I sine matrix
  ``S[i, j] = sqrt(2 / (n + 1)) * sin((i + 1)(j + 1) pi / (n + 1))``,
  which is symmetric and self-inverse.
* ``SINE_HAT`` -- ``diag(1, S_{n-2}, 1)``: identity on both border samples,
  type-I sine transform on the interior.  Symmetric, self-inverse.
* ``ANTI_REFLECTIVE`` -- the non-orthogonal matrix ``T`` whose first/last
  columns sample the linear ramps ``1 - x`` and ``x`` and whose interior
  columns are sine waves.  With ``Shat = diag(1, S_{n-2}, 1)`` it factors as
  ``T = Shat (I + U)`` and ``T^{-1} = (I - U) Shat`` where ``U`` holds two
  correction columns, so ``T`` is never formed densely: every apply costs one
  fast sine transform plus O(n) boundary work.

All applies run in O(n log n) (O(n^2 log n) for 2D tensor applies) via
``scipy.fft``.  Transform data cached per size is read-only, so transform
applications are safe to share across threads.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import fft as _fft


class TransformKind(Enum):
    DCT = "dct"
    DST1 = "dst1"
    ANTI_REFLECTIVE = "anti_reflective"
    SINE_HAT = "sine_hat"


def _check_nonempty(v: np.ndarray, axis: int) -> None:
    if v.shape[axis] == 0:
        raise ValueError("transform input must be non-empty")


def _check_interior(v: np.ndarray, axis: int, what: str) -> None:
    if v.shape[axis] < 3:
        raise ValueError(f"{what} requires length >= 3, got {v.shape[axis]}")


def dst1_apply(v, axis: int = -1) -> np.ndarray:
    """Apply the symmetric, self-inverse type-I sine transform S_n."""
    v = np.asarray(v, dtype=float)
    _check_nonempty(v, axis)
    return _fft.dst(v, type=1, norm="ortho", axis=axis)


def dct_apply(v, inverse: bool = False, axis: int = -1) -> np.ndarray:
    """Apply the orthogonal cosine matrix C_n (forward) or its transpose.

    Forward is synthesis (``C v``), inverse is analysis (``C^T v``); they
    compose to the identity.
    """
    v = np.asarray(v, dtype=float)
    _check_nonempty(v, axis)
    if inverse:
        return _fft.dct(v, type=2, norm="ortho", axis=axis)
    return _fft.idct(v, type=2, norm="ortho", axis=axis)


def sinehat_apply(v, axis: int = -1) -> np.ndarray:
    """Apply Shat_n = diag(1, S_{n-2}, 1): borders pass through unchanged."""
    v = np.asarray(v, dtype=float)
    _check_interior(v, axis, "Shat_n")
    out = v.copy()
    interior = [slice(None)] * v.ndim
    interior[axis] = slice(1, -1)
    interior = tuple(interior)
    out[interior] = _fft.dst(v[interior], type=1, norm="ortho", axis=axis)
    return out


@lru_cache(maxsize=None)
def _ar_corrections(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Correction columns S_{n-2} p and S_{n-2} J p of the rank-2 factor U."""
    j = np.arange(1, n - 1, dtype=float)
    p = 1.0 - j / (n - 1)
    q_left = _fft.dst(p, type=1, norm="ortho")
    q_right = _fft.dst(p[::-1], type=1, norm="ortho")
    q_left.setflags(write=False)
    q_right.setflags(write=False)
    return q_left, q_right


def ar_apply(v, inverse: bool = False, transpose: bool = False, axis: int = -1) -> np.ndarray:
    """Apply T_n, T_n^{-1}, T_n^T or T_n^{-T} via the rank-2 factorization.

    ``T = Shat (I + U)`` where the only nonzero columns of ``U`` are the
    cached corrections at positions 1 and n.  Transposed applies are needed
    for adjoints of anti-reflective blur operators.
    """
    v = np.asarray(v, dtype=float)
    _check_interior(v, axis, "T_n")
    n = v.shape[axis]
    q_left, q_right = _ar_corrections(n)
    idx = [slice(None)] * v.ndim
    idx[axis] = slice(1, -1)
    interior = tuple(idx)
    idx[axis] = slice(0, 1)
    first = tuple(idx)
    idx[axis] = slice(-1, None)
    last = tuple(idx)
    shape = [1] * v.ndim
    shape[axis] = n - 2
    ql = q_left.reshape(shape)
    qr = q_right.reshape(shape)

    out = v.copy()
    if not transpose:
        if not inverse:
            # T v = Shat (v + U v)
            out[interior] += v[first] * ql + v[last] * qr
            out[interior] = _fft.dst(out[interior], type=1, norm="ortho", axis=axis)
        else:
            # T^{-1} v = (I - U) Shat v
            out[interior] = _fft.dst(v[interior], type=1, norm="ortho", axis=axis)
            out[interior] -= v[first] * ql + v[last] * qr
    else:
        if not inverse:
            # T^T v = (I + U^T) Shat v
            out[interior] = _fft.dst(v[interior], type=1, norm="ortho", axis=axis)
            out[first] += np.sum(out[interior] * ql, axis=axis, keepdims=True)
            out[last] += np.sum(out[interior] * qr, axis=axis, keepdims=True)
        else:
            # T^{-T} v = Shat (I - U^T) v
            out[first] -= np.sum(v[interior] * ql, axis=axis, keepdims=True)
            out[last] -= np.sum(v[interior] * qr, axis=axis, keepdims=True)
            out[interior] = _fft.dst(v[interior], type=1, norm="ortho", axis=axis)
    return out


def apply_1d(kind: TransformKind, v, inverse: bool = False, transpose: bool = False,
             axis: int = -1) -> np.ndarray:
    """Dispatch a 1D transform apply along ``axis``."""
    if kind is TransformKind.DST1:
        return dst1_apply(v, axis=axis)
    if kind is TransformKind.SINE_HAT:
        return sinehat_apply(v, axis=axis)
    if kind is TransformKind.DCT:
        if transpose:
            inverse = not inverse
        return dct_apply(v, inverse=inverse, axis=axis)
    if kind is TransformKind.ANTI_REFLECTIVE:
        return ar_apply(v, inverse=inverse, transpose=transpose, axis=axis)
    raise ValueError(f"unknown transform kind: {kind!r}")


def tensor_apply_2d(kind: TransformKind, g, inverse: bool = False,
                    transpose: bool = False) -> np.ndarray:
    """Apply the tensor product X (x) X to a square grid.

    Realized as the 1D transform over all columns (axis 0) followed by all
    rows (axis 1); for a grid G this computes ``X G X^T`` and its
    inverse/transpose variants.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"tensor transform needs a square grid, got shape {g.shape}")
    out = apply_1d(kind, g, inverse=inverse, transpose=transpose, axis=0)
    return apply_1d(kind, out, inverse=inverse, transpose=transpose, axis=1)


def dense_matrix(kind: TransformKind, n: int, inverse: bool = False) -> np.ndarray:
    """Materialize a transform matrix from its defining formula (small n only).

    Intended for oracles and diagnostics; fast paths never call this.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if kind is TransformKind.DCT:
        i = np.arange(n)[:, None]
        j = np.arange(n)[None, :]
        c = np.sqrt((2.0 - (j == 0)) / n) * np.cos((2 * i + 1) * j * np.pi / (2 * n))
        return c.T if inverse else c
    if kind is TransformKind.DST1:
        ij = np.outer(np.arange(1, n + 1), np.arange(1, n + 1))
        return np.sqrt(2.0 / (n + 1)) * np.sin(ij * np.pi / (n + 1))
    if n < 3:
        raise ValueError(f"{kind.value} requires n >= 3")
    s = dense_matrix(TransformKind.DST1, n - 2)
    if kind is TransformKind.SINE_HAT:
        out = np.zeros((n, n))
        out[0, 0] = 1.0
        out[-1, -1] = 1.0
        out[1:-1, 1:-1] = s
        return out
    if kind is TransformKind.ANTI_REFLECTIVE:
        p = 1.0 - np.arange(1, n - 1) / (n - 1)
        out = np.zeros((n, n))
        out[0, 0] = 1.0
        out[-1, -1] = 1.0
        if not inverse:
            out[1:-1, 0] = p
            out[1:-1, -1] = p[::-1]
            out[1:-1, 1:-1] = s
        else:
            out[1:-1, 0] = -s @ p
            out[1:-1, -1] = -s @ p[::-1]
            out[1:-1, 1:-1] = s
        return out
    raise ValueError(f"unknown transform kind: {kind!r}")

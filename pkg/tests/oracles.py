"""Dense reference constructions built directly from defining formulas.

These are intentionally independent of the package's fast paths: transforms
come from their entry formulas, blur matrices from the scalar boundary rules
and the convolution sum, diffusion matrices from the stencil definition.
"""

import numpy as np


def dense_dst1(n: int) -> np.ndarray:
    ij = np.outer(np.arange(1, n + 1), np.arange(1, n + 1))
    return np.sqrt(2.0 / (n + 1)) * np.sin(ij * np.pi / (n + 1))


def dense_dct(n: int) -> np.ndarray:
    i = np.arange(1, n + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    return np.sqrt((2.0 - (j == 1)) / n) * np.cos((2 * i - 1) * (j - 1) * np.pi / (2 * n))


def dense_sinehat(n: int) -> np.ndarray:
    out = np.zeros((n, n))
    out[0, 0] = out[-1, -1] = 1.0
    out[1:-1, 1:-1] = dense_dst1(n - 2)
    return out


def dense_ar(n: int) -> np.ndarray:
    p = 1.0 - np.arange(1, n - 1) / (n - 1)
    out = np.zeros((n, n))
    out[0, 0] = out[-1, -1] = 1.0
    out[1:-1, 0] = p
    out[1:-1, -1] = p[::-1]
    out[1:-1, 1:-1] = dense_dst1(n - 2)
    return out


def extend_1d(u: np.ndarray, m: int, bc: str) -> np.ndarray:
    """Boundary extension written out from the scalar rules."""
    n = len(u)
    ext = np.zeros(n + 2 * m)
    ext[m:m + n] = u
    for j in range(1, m + 1):
        if bc == "zero":
            left = right = 0.0
        elif bc == "periodic":
            left, right = u[n - j], u[j - 1]
        elif bc == "reflective":
            left, right = u[j - 1], u[n - j]
        elif bc == "anti_reflective":
            left = 2 * u[0] - u[j]
            right = 2 * u[n - 1] - u[n - 1 - j]
        else:
            raise ValueError(bc)
        ext[m - j] = left
        ext[m + n - 1 + j] = right
    return ext


def blur_1d(u: np.ndarray, h: np.ndarray, bc: str) -> np.ndarray:
    """v_i = sum_j h_j u_{i-j} with the extension rules above."""
    m = (len(h) - 1) // 2
    n = len(u)
    ext = extend_1d(u, m, bc)
    out = np.zeros(n)
    for i in range(n):
        for j in range(-m, m + 1):
            out[i] += h[j + m] * ext[m + i - j]
    return out


def dense_blur_1d(h: np.ndarray, bc: str, n: int) -> np.ndarray:
    cols = [blur_1d(e, h, bc) for e in np.eye(n)]
    return np.column_stack(cols)


def extend_2d(u: np.ndarray, m: int, bc: str) -> np.ndarray:
    """Axis-wise extension; corners from composing the two axis rules."""
    ext = np.column_stack([extend_1d(row, m, bc) for row in u]).T
    ext = np.column_stack([extend_1d(col, m, bc) for col in ext.T])
    return ext


def blur_2d(u: np.ndarray, h: np.ndarray, bc: str) -> np.ndarray:
    m = (h.shape[0] - 1) // 2
    n = u.shape[0]
    ext = extend_2d(u, m, bc)
    out = np.zeros((n, n))
    for i in range(n):
        for k in range(n):
            block = ext[i:i + 2 * m + 1, k:k + 2 * m + 1]
            out[i, k] = np.sum(h[::-1, ::-1] * block)
    return out


def diffusion_dense_1d(a: np.ndarray, bc: str) -> np.ndarray:
    """Row-by-row tridiagonal assembly from the stencil with ghost rules."""
    n = len(a) - 1
    rows = np.zeros((n, n))
    for i in range(n):
        for target, coeff in (((i, i + 1), a[i + 1]), ((i, i - 1), a[i])):
            _, j = target
            rows[i, i] += coeff
            if 0 <= j < n:
                rows[i, j] -= coeff
            elif bc == "zero_neumann":
                rows[i, i] -= coeff  # ghost equals the border sample
            else:  # anti-reflective ghost: 2 u_border - u_mirror
                rows[i, i] -= 2 * coeff
                mirror = 1 if j < 0 else n - 2
                rows[i, mirror] += coeff
    return rows

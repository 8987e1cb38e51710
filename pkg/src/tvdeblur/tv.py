"""Lagged-diffusivity diffusion operator and first-order optimality residual.

The smoothed total-variation penalty contributes the elliptic term
``-div(a grad u)`` with coefficient ``a = 1 / sqrt(|grad u|^2 + beta^2)``
frozen at the previous iterate.  This module discretizes that operator on a
unit-spacing grid with midpoint coefficients:

* 1D: ``(L w)[i] = a[i+1/2] (w[i] - w[i+1]) + a[i-1/2] (w[i] - w[i-1])``,
* 2D: the 5-point analog with per-edge coefficients; the gradient magnitude
  at an edge midpoint combines the difference across the edge with a
  four-point average of the one-sided differences in the transverse
  direction.

Ghost values for both the coefficients and the operator stencil come from
the operator's boundary rule: reflection (zero Neumann, giving a symmetric
positive-semidefinite matrix) or anti-reflection (nonsymmetric).  Both
variants annihilate constants.
"""

from __future__ import annotations

from enum import Enum

import numpy as np


class DiffusionBc(Enum):
    ZERO_NEUMANN = "zero_neumann"
    ANTI_REFLECTIVE = "anti_reflective"


_PAD = {
    DiffusionBc.ZERO_NEUMANN: {"mode": "symmetric"},
    DiffusionBc.ANTI_REFLECTIVE: {"mode": "reflect", "reflect_type": "odd"},
}


def _extend(u: np.ndarray, bc: DiffusionBc) -> np.ndarray:
    return np.pad(u, 1, **_PAD[bc])


def diffusion_coefficients(u, beta: float, bc: DiffusionBc = DiffusionBc.ZERO_NEUMANN,
                           spacing: float = 1.0):
    """Midpoint coefficients ``1 / sqrt(|grad u|^2 + beta^2)`` on cell edges.

    1D returns one array of length n+1 (boundary edges included); 2D returns
    ``(horizontal, vertical)`` arrays of shapes n x (n+1) and (n+1) x n.
    Gradients are divided differences over ``spacing`` (default unit grid).
    Boundary edges use ghost values extended by ``bc``, so all coefficients
    lie in ``(0, 1/beta]``.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    u = np.asarray(u, dtype=float)
    ext = _extend(u, bc)
    if u.ndim == 1:
        d = np.diff(ext) / spacing
        return 1.0 / np.sqrt(d * d + beta * beta)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square grid, got shape {u.shape}")
    dh = np.diff(ext, axis=1) / spacing  # (n+2) x (n+1)
    dv = np.diff(ext, axis=0) / spacing  # (n+1) x (n+2)
    # transverse gradient at an edge midpoint: four-point average of the
    # one-sided differences at the edge endpoints
    trans_h = 0.25 * (dv[:-1, :-1] + dv[1:, :-1] + dv[:-1, 1:] + dv[1:, 1:])
    horizontal = 1.0 / np.sqrt(dh[1:-1, :] ** 2 + trans_h ** 2 + beta * beta)
    trans_v = 0.25 * (dh[:-1, :-1] + dh[:-1, 1:] + dh[1:, :-1] + dh[1:, 1:])
    vertical = 1.0 / np.sqrt(dv[:, 1:-1] ** 2 + trans_v ** 2 + beta * beta)
    return horizontal, vertical


class DiffusionOperator:
    """Banded lagged-diffusivity operator built from an iterate.

    Immutable after construction; rebuild per fixed-point step.  ``bands``
    (1D) and ``block_banded`` (2D) expose the matrix structure consumed by
    the transform-algebra projections: plain dicts mapping offsets to
    coefficient arrays.
    """

    def __init__(self, u, beta: float, bc: DiffusionBc = DiffusionBc.ZERO_NEUMANN,
                 spacing: float = 1.0) -> None:
        u = np.asarray(u, dtype=float)
        self.bc = bc
        self.beta = float(beta)
        self.spacing = float(spacing)
        self.ndim = u.ndim
        self.n = u.shape[0]
        if u.ndim == 1:
            self.a = diffusion_coefficients(u, beta, bc, spacing)
        else:
            self.a_h, self.a_v = diffusion_coefficients(u, beta, bc, spacing)

    def apply(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        expected = (self.n,) if self.ndim == 1 else (self.n, self.n)
        if w.shape != expected:
            raise ValueError(f"expected shape {expected}, got {w.shape}")
        ext = _extend(w, self.bc)
        inv_h2 = 1.0 / (self.spacing * self.spacing)
        if self.ndim == 1:
            flux = self.a * np.diff(ext)
            return -inv_h2 * np.diff(flux)
        flux_h = self.a_h * np.diff(ext[1:-1, :], axis=1)
        flux_v = self.a_v * np.diff(ext[:, 1:-1], axis=0)
        return -inv_h2 * (np.diff(flux_h, axis=1) + np.diff(flux_v, axis=0))

    def diagonal(self) -> np.ndarray:
        """Main diagonal, accounting for ghost-value substitution at borders."""
        if self.ndim == 1:
            return self.bands()[0]
        return self.block_banded()[(0, 0)]

    def bands(self) -> dict[int, np.ndarray]:
        """Tridiagonal representation: offset -> band values.

        ``bands[d][i]`` is the matrix entry at row i, column i + d.
        """
        if self.ndim != 1:
            raise ValueError("bands() is the 1D representation")
        a = self.a
        diag = a[:-1] + a[1:]
        upper = -a[1:-1].copy()
        lower = -a[1:-1].copy()
        if self.bc is DiffusionBc.ZERO_NEUMANN:
            diag[0] -= a[0]
            diag[-1] -= a[-1]
        else:
            diag[0] -= 2.0 * a[0]
            diag[-1] -= 2.0 * a[-1]
            upper[0] += a[0]
            lower[-1] += a[-1]
        inv_h2 = 1.0 / (self.spacing * self.spacing)
        return {0: inv_h2 * diag, 1: inv_h2 * upper, -1: inv_h2 * lower}

    def block_banded(self) -> dict[tuple[int, int], np.ndarray]:
        """5-point stencil as block bands: (block offset, inner offset) -> grid.

        Block index is the grid row (axis 0), inner index the grid column.
        ``blocks[(do, di)][k, i]`` is the entry coupling cell (k, i) to cell
        (k + do, i + di).
        """
        if self.ndim != 2:
            raise ValueError("block_banded() is the 2D representation")
        n = self.n
        ah, av = self.a_h, self.a_v
        diag = ah[:, :-1] + ah[:, 1:] + av[:-1, :] + av[1:, :]
        inner_up = -ah[:, 1:-1].copy()
        inner_lo = -ah[:, 1:-1].copy()
        block_up = -av[1:-1, :].copy()
        block_lo = -av[1:-1, :].copy()
        if self.bc is DiffusionBc.ZERO_NEUMANN:
            diag[:, 0] -= ah[:, 0]
            diag[:, -1] -= ah[:, -1]
            diag[0, :] -= av[0, :]
            diag[-1, :] -= av[-1, :]
        else:
            diag[:, 0] -= 2.0 * ah[:, 0]
            diag[:, -1] -= 2.0 * ah[:, -1]
            diag[0, :] -= 2.0 * av[0, :]
            diag[-1, :] -= 2.0 * av[-1, :]
            inner_up[:, 0] += ah[:, 0]
            inner_lo[:, -1] += ah[:, -1]
            block_up[0, :] += av[0, :]
            block_lo[-1, :] += av[-1, :]
        inv_h2 = 1.0 / (self.spacing * self.spacing)
        return {
            (0, 0): inv_h2 * diag,
            (0, 1): inv_h2 * inner_up,
            (0, -1): inv_h2 * inner_lo,
            (1, 0): inv_h2 * block_up,
            (-1, 0): inv_h2 * block_lo,
        }

    def dense(self) -> np.ndarray:
        """Assemble the operator densely by probing (small sizes, oracles)."""
        size = self.n if self.ndim == 1 else self.n * self.n
        if size > 4096:
            raise ValueError("dense() is a desk-scale oracle")
        out = np.empty((size, size))
        for k in range(size):
            e = np.zeros(size)
            e[k] = 1.0
            out[:, k] = self.apply(e if self.ndim == 1 else e.reshape(self.n, self.n)).reshape(-1)
        return out


def el_residual(u, v, h_op, alpha: float, beta: float,
                bc_l: DiffusionBc = DiffusionBc.ZERO_NEUMANN,
                reblur: bool = False, spacing: float = 1.0) -> np.ndarray:
    """First-order optimality residual of the smoothed-TV objective.

    ``g(u) = H*(H u - v) + alpha L(u) u`` with the adjoint replaced by the
    rotated-kernel operator when ``reblur`` is set.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    residual = h_op.apply(u) - v
    back = h_op.reblur_apply(residual) if reblur else h_op.apply_transpose(residual)
    return back + alpha * DiffusionOperator(u, beta, bc_l, spacing).apply(u)

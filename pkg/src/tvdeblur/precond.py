"""Transform-algebra projections and factored preconditioners.

Every preconditioner here lives inside a commutative matrix algebra
diagonalized by one fast transform:

* cosine algebra  ``{C diag(v) C^T}``          (reflective operators),
* sine algebra    ``{S diag(v) S}``            (type-I sine, self-inverse),
* bordered sine   ``{Shat diag(v) Shat}``      with ``Shat = diag(1, S, 1)``,
* anti-reflective ``{T diag(v) T^{-1}}``       (non-orthogonal transform).

For the three orthogonal algebras the Frobenius-closest member of the
algebra to a matrix ``A`` has eigenvalues ``diag(X^T A X)``; for banded
``A`` each band contributes a closed-form quadratic trigonometric sum that
is evaluated for all frequencies at once with a single FFT, so projecting a
bandwidth-b matrix costs O(b n log n) and never materializes anything dense.

The anti-reflective map is not a Frobenius projection (the transform is not
unitary): it projects the interior onto the sine algebra, recovers the
first-column representer ``z`` of that sine matrix by back-substitution, and
fills the first/last columns with the cumulative sums that place the result
inside the anti-reflective algebra.  Its two border eigenvalues equal the
(1,1) entry of the bordered matrix.

Two-level (2D) versions apply the one-dimensional map blockwise, regroup
indices with the vec permutation (outer and inner indices swapped), and
apply it blockwise again.  For the orthogonal algebras this reproduces the
Frobenius-optimal member of the tensor algebra; the whole construction runs
on block-band coefficient arrays with batched FFTs in O(n^2 log n).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as _fft
from scipy.linalg import hankel, toeplitz

from .transforms import TransformKind, apply_1d, tensor_apply_2d

logger = logging.getLogger(__name__)

Bands1D = dict[int, np.ndarray]
Bands2D = dict[tuple[int, int], np.ndarray]

#: preconditioner kind -> (transform algebra, plain diagonal scaling wrap,
#: scaled-system variant)
_FAMILIES = {
    "R": TransformKind.DCT,
    "M": TransformKind.SINE_HAT,
    "P": TransformKind.ANTI_REFLECTIVE,
}

PRECONDITIONER_KINDS = (
    "R", "D_R", "R_D", "M", "D_M", "M_D", "P", "D_P", "P_D",
)


class IndefinitePreconditionerError(RuntimeError):
    """A factored preconditioner came out with a nonpositive eigenvalue."""

    def __init__(self, kind: str, alpha: float, min_eigenvalue: float) -> None:
        super().__init__(
            f"preconditioner {kind!r} is indefinite at alpha={alpha!r} "
            f"(smallest eigenvalue {min_eigenvalue!r})"
        )
        self.kind = kind
        self.alpha = alpha
        self.min_eigenvalue = min_eigenvalue


class TauConsistencyError(ValueError):
    """Input claimed to be in the sine algebra is not, beyond tolerance."""


# ---------------------------------------------------------------------------
# banded quadratic forms: sum_i band[i] * X[i, t] * X[i + d, t] for all t
# ---------------------------------------------------------------------------


def _cosine_band_form(band: np.ndarray, offset: int, n: int) -> np.ndarray:
    """Contribution of one band to diag(C^T A C), batched over leading axes.

    Uses cos(u)cos(v) = (cos(u+v) + cos(u-v))/2: the frequency-sum part is a
    length-2n FFT of the band placed on odd/even slots, the difference part
    collapses to the band total.
    """
    d = abs(offset)
    band = np.asarray(band, dtype=float)
    length = n - d
    if length <= 0 or band.shape[-1] == 0:
        return np.zeros(band.shape[:-1] + (n,))
    if band.shape[-1] != length:
        raise ValueError(f"band for offset {offset} must have length {length}")
    arr = np.zeros(band.shape[:-1] + (2 * n,))
    arr[..., d + 1: d + 1 + 2 * length: 2] = band
    freq_sum = _fft.rfft(arr, axis=-1)[..., :n].real
    t = np.arange(n)
    gamma = t * np.pi / (2 * n)
    rho2 = np.where(t == 0, 1.0, 2.0) / n
    total = band.sum(axis=-1, keepdims=True)
    return 0.5 * rho2 * (total * np.cos(2 * d * gamma) + freq_sum)


def _sine_band_form(band: np.ndarray, offset: int, n: int) -> np.ndarray:
    """Contribution of one band to diag(S A S), batched over leading axes."""
    d = abs(offset)
    band = np.asarray(band, dtype=float)
    length = n - d
    if length <= 0 or band.shape[-1] == 0:
        return np.zeros(band.shape[:-1] + (n,))
    if band.shape[-1] != length:
        raise ValueError(f"band for offset {offset} must have length {length}")
    arr = np.zeros(band.shape[:-1] + (2 * (n + 1),))
    arr[..., d + 2: d + 2 + 2 * length: 2] = band
    freq_sum = _fft.rfft(arr, axis=-1)[..., 1: n + 1].real
    t = np.arange(1, n + 1)
    theta = np.pi / (n + 1)
    total = band.sum(axis=-1, keepdims=True)
    return (total * np.cos(d * t * theta) - freq_sum) / (n + 1)


def _interior_bands(bands, n: int):
    """Bands of the (2:n-1, 2:n-1) submatrix of a banded matrix."""
    out = {}
    for d, band in bands.items():
        sliced = np.asarray(band, dtype=float)[..., 1: n - 1 - abs(d)]
        if sliced.shape[-1] > 0:
            out[d] = sliced
    return out


def _z_from_sine_eigenvalues(lam: np.ndarray) -> np.ndarray:
    """First-column representer z of S diag(lam) S via back-substitution.

    The first column of a sine-algebra matrix equals ``z`` minus its own
    entries shifted up by two, so ``z[k] = col[k] + z[k+2]``.
    """
    col = _fft.dst(lam * _first_sine_column(lam.shape[-1]), type=1, norm="ortho",
                   axis=-1)
    z = col.copy()
    length = z.shape[-1]
    for parity in (length - 1, length - 2):
        if parity < 0:
            continue
        z[..., parity::-2] = np.cumsum(col[..., parity::-2], axis=-1)
    return z


def _first_sine_column(n: int) -> np.ndarray:
    t = np.arange(1, n + 1)
    return np.sqrt(2.0 / (n + 1)) * np.sin(t * np.pi / (n + 1))


def _ar_parts_banded(bands, n: int):
    """Interior sine eigenvalues, z, and border value of the AR map."""
    interior = _interior_bands(bands, n)
    shape = next(iter(bands.values())).shape[:-1] if bands else ()
    lam_int = np.zeros(shape + (n - 2,))
    for d, band in interior.items():
        lam_int += _sine_band_form(band, d, n - 2)
    z = _z_from_sine_eigenvalues(lam_int)
    border = 2.0 * z.sum(axis=-1) - z[..., 0]
    return lam_int, z, border


def _eigs_banded(kind: TransformKind, bands, n: int) -> np.ndarray:
    """Algebra eigenvalues of a banded matrix; batched over leading axes."""
    if kind is TransformKind.DCT:
        parts = [_cosine_band_form(b, d, n) for d, b in bands.items()]
        return sum(parts) if parts else np.zeros(n)
    if kind is TransformKind.DST1:
        parts = [_sine_band_form(b, d, n) for d, b in bands.items()]
        return sum(parts) if parts else np.zeros(n)
    if kind in (TransformKind.SINE_HAT, TransformKind.ANTI_REFLECTIVE):
        if n < 3:
            raise ValueError(f"{kind.value} projection requires n >= 3")
        shape = next(iter(bands.values())).shape[:-1] if bands else ()
        out = np.zeros(shape + (n,))
        if kind is TransformKind.SINE_HAT:
            diag_band = bands.get(0)
            if diag_band is not None:
                out[..., 0] = diag_band[..., 0]
                out[..., -1] = diag_band[..., -1]
            interior = _interior_bands(bands, n)
            lam_int = np.zeros(shape + (n - 2,))
            for d, band in interior.items():
                lam_int += _sine_band_form(band, d, n - 2)
            out[..., 1:-1] = lam_int
            return out
        if n < 5:
            raise ValueError("anti-reflective projection requires n >= 5")
        lam_int, _, border = _ar_parts_banded(bands, n)
        out[..., 0] = border
        out[..., 1:-1] = lam_int
        out[..., -1] = border
        return out
    raise ValueError(f"unknown projection kind: {kind!r}")


# ---------------------------------------------------------------------------
# dense inputs (desk-scale oracles and small operators)
# ---------------------------------------------------------------------------


def _diag_sandwich(kind: TransformKind, a: np.ndarray) -> np.ndarray:
    """diag(X^T A X) for an orthogonal transform, via fast applies."""
    m = apply_1d(kind, a, inverse=True, axis=0)
    m = apply_1d(kind, m, inverse=True, axis=1)
    return np.diagonal(m).copy()


def _eigs_dense(kind: TransformKind, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {a.shape}")
    if kind in (TransformKind.DCT, TransformKind.DST1):
        return _diag_sandwich(kind, a)
    if n < 3:
        raise ValueError(f"{kind.value} projection requires n >= 3")
    if kind is TransformKind.SINE_HAT:
        out = np.empty(n)
        out[0] = a[0, 0]
        out[-1] = a[-1, -1]
        out[1:-1] = _diag_sandwich(TransformKind.DST1, a[1:-1, 1:-1])
        return out
    if kind is TransformKind.ANTI_REFLECTIVE:
        if n < 5:
            raise ValueError("anti-reflective projection requires n >= 5")
        lam_int = _diag_sandwich(TransformKind.DST1, a[1:-1, 1:-1])
        z = _z_from_sine_eigenvalues(lam_int)
        border = 2.0 * z.sum() - z[0]
        return np.concatenate([[border], lam_int, [border]])
    raise ValueError(f"unknown projection kind: {kind!r}")


def _eigs_any(kind: TransformKind, a, n: int | None = None) -> np.ndarray:
    if isinstance(a, dict):
        if n is None:
            n = max(band.shape[-1] + abs(d) for d, band in a.items())
        return _eigs_banded(kind, a, n)
    return _eigs_dense(kind, np.asarray(a, dtype=float))


def cosine_project(a, n: int | None = None) -> np.ndarray:
    """Eigenvalues of the Frobenius-closest cosine-algebra matrix to ``a``.

    ``a`` is either a dense square array or a band dict ``{offset: values}``
    (values indexed by the smaller of row/column).  The projected matrix is
    ``C diag(result) C^T``.
    """
    return _eigs_any(TransformKind.DCT, a, n)


def sine_project(a, n: int | None = None) -> np.ndarray:
    """Eigenvalues of the Frobenius-closest sine-algebra matrix to ``a``."""
    return _eigs_any(TransformKind.DST1, a, n)


def sinehat_project(a, n: int | None = None) -> np.ndarray:
    """Eigenvalues of the closest bordered-sine-algebra matrix to ``a``.

    The result is ``(a[0,0], sine eigenvalues of the interior, a[n-1,n-1])``:
    the bordered transform fixes the two border coordinates, so the
    projection acts independently on corners and interior.
    """
    return _eigs_any(TransformKind.SINE_HAT, a, n)


def tau_extract_z(b, tol: float = 1e-8) -> np.ndarray:
    """Recover the representer z of a sine-algebra matrix from its first column.

    A sine-algebra matrix equals ``Toeplitz(z) - Hankel`` built from z
    shifted by two, hence ``z[k] = col[k] + z[k+2]`` with two trailing zeros.
    Raises :class:`TauConsistencyError` when the reconstruction misses ``b``
    beyond ``tol`` (relative to its Frobenius norm).
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if b.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {b.shape}")
    col = b[:, 0]
    z = col.copy()
    for k in range(n - 3, -1, -1):
        z[k] += z[k + 2]
    residual = np.linalg.norm(b - tau_dense_from_z(z))
    if residual > tol * max(1.0, np.linalg.norm(b)):
        raise TauConsistencyError(
            f"matrix is not in the sine algebra (residual {residual:.3e})"
        )
    return z


def tau_dense_from_z(z: np.ndarray) -> np.ndarray:
    """Dense sine-algebra matrix with representer z (oracle helper)."""
    z = np.asarray(z, dtype=float)
    shifted = np.concatenate([z[2:], [0.0, 0.0]])
    return toeplitz(z) - hankel(shifted, shifted[::-1])


@dataclass(frozen=True)
class ArProjection:
    """Anti-reflective-algebra approximation in factored form."""

    n: int
    z: np.ndarray
    interior_eigenvalues: np.ndarray
    border_value: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate(
            [[self.border_value], self.interior_eigenvalues, [self.border_value]]
        )

    def dense(self) -> np.ndarray:
        """Bordered matrix: sine interior plus cumulative-sum edge columns."""
        n = self.n
        suffix = np.cumsum(self.z[::-1])[::-1]
        xi = 2.0 * suffix - self.z
        s = apply_1d(TransformKind.DST1, np.eye(n - 2), axis=0)
        out = np.zeros((n, n))
        out[1:-1, 1:-1] = (s * self.interior_eigenvalues) @ s
        out[: n - 2, 0] = xi
        out[n - 1: 1: -1, n - 1] = xi
        return out


def ar_project(a, n: int | None = None) -> ArProjection:
    """Anti-reflective-algebra approximation of ``a`` (dense or band dict).

    Builds the sine projection of the interior, extracts its representer z,
    and borders it so the result lies in the anti-reflective algebra; the two
    border eigenvalues equal the top-left entry of the bordered matrix.
    """
    if isinstance(a, dict):
        if n is None:
            n = max(band.shape[-1] + abs(d) for d, band in a.items())
        if n < 5:
            raise ValueError("anti-reflective projection requires n >= 5")
        lam_int, z, border = _ar_parts_banded(a, n)
    else:
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        if n < 5:
            raise ValueError("anti-reflective projection requires n >= 5")
        lam_int = _diag_sandwich(TransformKind.DST1, a[1:-1, 1:-1])
        z = _z_from_sine_eigenvalues(lam_int)
        border = 2.0 * z.sum() - z[0]
    return ArProjection(n=n, z=z, interior_eigenvalues=lam_int,
                        border_value=float(border))


def ar_membership_residual(matrix: np.ndarray) -> float:
    """Off-diagonal mass of T^{-1} A T, normalized by ||A||_F (diagnostic)."""
    a = np.asarray(matrix, dtype=float)
    m = apply_1d(TransformKind.ANTI_REFLECTIVE, a, inverse=True, axis=0)
    m = apply_1d(TransformKind.ANTI_REFLECTIVE, m.T, transpose=True, axis=0).T
    off = m - np.diag(np.diag(m))
    return float(np.linalg.norm(off) / max(1.0, np.linalg.norm(a)))


# ---------------------------------------------------------------------------
# two-level (2D) projections
# ---------------------------------------------------------------------------


def level2_project(kind: TransformKind, a, n: int | None = None) -> np.ndarray:
    """Two-level algebra eigenvalues of a block-structured operator.

    ``a`` is either a block-band dict ``{(block offset, inner offset):
    coefficients[k, i]}`` (never densified; batched FFTs give O(n^2 log n))
    or, for oracle use only, a dense n^2-by-n^2 array with n <= 32.

    Returns the n-by-n eigenvalue grid ``lam[s, t]`` aligned with the tensor
    transform: ``s`` indexes the block-level (axis 0) frequency, ``t`` the
    inner one.  The construction applies the one-level map blockwise, swaps
    outer/inner indices with the vec permutation, and applies it blockwise
    again.
    """
    if isinstance(a, dict):
        if n is None:
            n = max(band.shape[-1] + abs(d) for (_, d), band in a.items())
        by_block_offset: dict[int, Bands1D] = {}
        for (do, di), band in a.items():
            by_block_offset.setdefault(do, {})[di] = np.asarray(band, dtype=float)
        stage2_bands: Bands1D = {}
        for do, inner_bands in by_block_offset.items():
            # level 1: eigenvalues of every block A_{k, k+do}, batched over k
            lam_blocks = _eigs_banded(kind, inner_bands, n)
            # regrouped matrices G_t have lam_blocks[:, t] on block offset do
            stage2_bands[do] = lam_blocks.T
        grid = _eigs_banded(kind, stage2_bands, n)  # grid[t, s]
        return grid.T
    a = np.asarray(a, dtype=float)
    if n is None:
        n = int(round(np.sqrt(a.shape[0])))
    if a.shape != (n * n, n * n):
        raise ValueError(f"expected a {n * n}x{n * n} matrix, got {a.shape}")
    if n > 32:
        raise ValueError("dense two-level projection is an oracle, n <= 32")
    blocks = a.reshape(n, n, n, n).transpose(0, 2, 1, 3)
    lam_blocks = np.empty((n, n, n))
    for k in range(n):
        for l in range(n):
            lam_blocks[k, l] = _eigs_dense(kind, blocks[k, l])
    grid = np.empty((n, n))
    for t in range(n):
        grid[:, t] = _eigs_dense(kind, lam_blocks[:, :, t])
    return grid


# ---------------------------------------------------------------------------
# factored preconditioners
# ---------------------------------------------------------------------------


@dataclass
class FactoredPreconditioner:
    """Preconditioner stored as transform + eigenvalues (+ diagonal wrap).

    ``apply_inverse`` solves ``M y = b`` with one analysis transform, an
    eigenvalue division, and one synthesis transform; diagonal-wrapped kinds
    scale by ``D^{-1/2}`` on both sides.  Eigenvalues are checked positive at
    construction; denominators below ``1e-14 * max`` are clamped (with a log
    warning) so nearly singular blur symbols cannot poison the solve.
    """

    kind: str
    transform: TransformKind
    eigenvalues: np.ndarray
    alpha: float
    d_sqrt: np.ndarray | None = None
    _inverse_eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        lam = np.asarray(self.eigenvalues, dtype=float)
        smallest = float(lam.min())
        if smallest <= 0.0:
            raise IndefinitePreconditionerError(self.kind, self.alpha, smallest)
        floor = 1e-14 * float(lam.max())
        clamped = int(np.count_nonzero(lam < floor))
        if clamped:
            logger.warning(
                "preconditioner %s: clamped %d eigenvalue(s) below %.3e",
                self.kind, clamped, floor,
            )
        self.eigenvalues = lam
        self._inverse_eigenvalues = 1.0 / np.maximum(lam, floor)

    @property
    def ndim(self) -> int:
        return self.eigenvalues.ndim

    def _diagonalized(self, b: np.ndarray, lam: np.ndarray) -> np.ndarray:
        if self.ndim == 1:
            coeff = apply_1d(self.transform, b, inverse=True)
            return apply_1d(self.transform, lam * coeff)
        coeff = tensor_apply_2d(self.transform, b, inverse=True)
        return tensor_apply_2d(self.transform, lam * coeff)

    def apply(self, b) -> np.ndarray:
        """Multiply by the preconditioner matrix."""
        b = np.asarray(b, dtype=float)
        if self.d_sqrt is not None:
            return self.d_sqrt * self._diagonalized(self.d_sqrt * b,
                                                    self.eigenvalues)
        return self._diagonalized(b, self.eigenvalues)

    def apply_inverse(self, b) -> np.ndarray:
        """Solve M y = b."""
        b = np.asarray(b, dtype=float)
        if self.d_sqrt is not None:
            scaled = b / self.d_sqrt
            return self._diagonalized(scaled, self._inverse_eigenvalues) / self.d_sqrt
        return self._diagonalized(b, self._inverse_eigenvalues)

    def dense(self) -> np.ndarray:
        """Materialize by probing (oracle use)."""
        size = self.eigenvalues.size
        if size > 4096:
            raise ValueError("dense() is a desk-scale oracle")
        n = self.eigenvalues.shape[0]
        out = np.empty((size, size))
        for k in range(size):
            e = np.zeros(size)
            e[k] = 1.0
            out[:, k] = self.apply(e if self.ndim == 1 else e.reshape(n, n)).reshape(-1)
        return out


def _scaled_bands_1d(bands: Bands1D, s: np.ndarray) -> Bands1D:
    out = {}
    for d, band in bands.items():
        k = abs(d)
        out[d] = band * s[: len(s) - k] * s[k:]
    return out


def _scaled_blocks_2d(blocks: Bands2D, s: np.ndarray) -> Bands2D:
    n = s.shape[0]
    out = {}
    for (do, di), band in blocks.items():
        r0, c0 = max(0, -do), max(0, -di)
        r1, c1 = max(0, do), max(0, di)
        rows, cols = band.shape
        out[(do, di)] = (
            band
            * s[r0: r0 + rows, c0: c0 + cols]
            * s[r1: r1 + rows, c1: c1 + cols]
        )
    return out


def assemble_preconditioner(kind: str, h_op, l_op, alpha: float) -> FactoredPreconditioner:
    """Build one of the nine factored preconditioners.

    Families: ``R``/``D_R``/``R_D`` live in the cosine algebra and expect a
    reflective blur operator; ``M``/``D_M``/``M_D`` in the bordered sine
    algebra and ``P``/``D_P``/``P_D`` in the anti-reflective algebra, both
    expecting an anti-reflective blur operator.  The base kind is
    ``|lam_H|^2 + alpha * proj(L)``; ``D_X`` wraps it with the diagonal
    ``sqrt(I + alpha diag L)`` on both sides; ``X_D`` targets the
    diagonally scaled system and uses
    ``|lam_H|^2 |lam_D|^2 + alpha * proj(scaled L)``.
    """
    from .blur import BoundaryCondition  # local import to avoid a cycle

    if kind not in PRECONDITIONER_KINDS:
        raise ValueError(f"unknown preconditioner kind {kind!r}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    base = kind.replace("D_", "").replace("_D", "")
    transform = _FAMILIES[base]
    expected_bc = (
        BoundaryCondition.REFLECTIVE if base == "R"
        else BoundaryCondition.ANTI_REFLECTIVE
    )
    if h_op.bc is not expected_bc:
        raise ValueError(
            f"preconditioner {kind!r} requires a blur operator with "
            f"{expected_bc.value!r} boundary conditions, got {h_op.bc.value!r}"
        )
    ndim = h_op.ndim
    lam_h = h_op.eigenvalues()
    n = h_op.n

    if ndim == 1:
        l_struct = l_op.bands()
        project = lambda bands: _eigs_banded(transform, bands, n)  # noqa: E731
        scale = _scaled_bands_1d
        diag_bands = lambda v: {0: v}  # noqa: E731
    else:
        l_struct = l_op.block_banded()
        project = lambda blocks: level2_project(transform, blocks, n)  # noqa: E731
        scale = _scaled_blocks_2d
        diag_bands = lambda v: {(0, 0): v}  # noqa: E731

    diag_l = l_op.diagonal()
    d = 1.0 + alpha * diag_l
    if np.min(d) <= 0:
        raise IndefinitePreconditionerError(kind, alpha, float(np.min(d)))

    if kind.endswith("_D"):
        s = d ** -0.5
        lam_d = project(diag_bands(s))
        lam_lt = project(scale(l_struct, s))
        eigs = lam_h * lam_h * lam_d * lam_d + alpha * lam_lt
        return FactoredPreconditioner(kind, transform, eigs, alpha)
    eigs = lam_h * lam_h + alpha * project(l_struct)
    d_sqrt = np.sqrt(d) if kind.startswith("D_") else None
    return FactoredPreconditioner(kind, transform, eigs, alpha, d_sqrt=d_sqrt)


# ---------------------------------------------------------------------------
# small-n spectral diagnostics
# ---------------------------------------------------------------------------


@dataclass
class SpectralDiagnostic:
    """Eigenvalues of a dense preconditioned matrix plus a cluster summary."""

    eigenvalues: np.ndarray
    histogram: np.ndarray
    bin_edges: np.ndarray
    cluster_radius: float
    cluster_fraction: float

    def histogram_lines(self) -> list[str]:
        width = 50
        top = max(1, int(self.histogram.max()))
        lines = []
        for count, lo, hi in zip(self.histogram, self.bin_edges, self.bin_edges[1:]):
            bar = "#" * int(round(width * count / top))
            lines.append(f"[{lo:+.4e}, {hi:+.4e})  {count:6d}  {bar}")
        return lines


def spectral_diagnostic(a_dense: np.ndarray, m_dense: np.ndarray,
                        bins: int = 20, cluster_radius: float = 0.1) -> SpectralDiagnostic:
    """Eigenvalues of M^{-1} A with a histogram and cluster-at-one report."""
    from scipy.linalg import eigvals

    prec = np.linalg.solve(m_dense, a_dense)
    eigs = eigvals(prec)
    real = np.real(eigs)
    hist, edges = np.histogram(real, bins=bins)
    fraction = float(np.mean(np.abs(eigs - 1.0) <= cluster_radius))
    order = np.argsort(real)
    return SpectralDiagnostic(
        eigenvalues=eigs[order],
        histogram=hist,
        bin_edges=edges,
        cluster_radius=cluster_radius,
        cluster_fraction=fraction,
    )

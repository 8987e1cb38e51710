"""Benchmark harness: test-problem generation, parameter sweeps, file output.

The harness reproduces a deblurring benchmark protocol at desk scale:

1. generate a deterministic piecewise test signal (or synthetic image) on an
   extended grid, so the observed data comes from *real* out-of-domain
   samples rather than from any boundary assumption;
2. blur it with an out-of-focus or Gaussian kernel (exact convolution of the
   extended truth, cropped to the field of view) and add seeded Gaussian
   noise with a prescribed noise-to-signal ratio;
3. run restorations over a grid of (configuration, alpha, beta, n,
   preconditioner) cells and emit CSV tables, RRE-versus-alpha curves, and
   restored outputs (two-column CSV in 1D, 8-bit PGM in 2D).

Noise uses ``numpy.random.Generator(PCG64(seed))`` with
``standard_normal`` -- a named, portable 64-bit generator whose streams are
stable across platforms -- so a fixed seed reproduces observations bit for
bit.  Cells that fail to converge (or raise a numerical error) are recorded
as ``*`` and never abort a sweep.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import convolve2d

from .blur import BoundaryCondition, SymmetricPsf
from .krylov import (
    IndefiniteOperatorError,
    KrylovConfig,
    SolverBreakdownError,
    SolverDivergenceError,
)
from .pipeline import (
    Formulation,
    InvalidScalingError,
    PrecondSelector,
    RestorationConfig,
    RestorationReport,
    restore,
)
from .precond import IndefinitePreconditionerError
from .tv import DiffusionBc

#: configuration label -> (blur BC, diffusion BC, formulation)
CONFIGURATIONS: dict[str, tuple[BoundaryCondition, DiffusionBc, Formulation]] = {
    "R": (BoundaryCondition.REFLECTIVE, DiffusionBc.ZERO_NEUMANN,
          Formulation.NORMAL),
    "AR+Sine+ZN": (BoundaryCondition.ANTI_REFLECTIVE, DiffusionBc.ZERO_NEUMANN,
                   Formulation.NORMAL),
    "AR+Reblur+ZN": (BoundaryCondition.ANTI_REFLECTIVE, DiffusionBc.ZERO_NEUMANN,
                     Formulation.REBLUR),
    "AR+Reblur+AR": (BoundaryCondition.ANTI_REFLECTIVE,
                     DiffusionBc.ANTI_REFLECTIVE, Formulation.REBLUR),
}

PRECOND_SELECTORS = {
    "none": PrecondSelector.NONE,
    "diag": PrecondSelector.DIAG,
    "x": PrecondSelector.X,
    "d_x": PrecondSelector.D_X,
    "x_d": PrecondSelector.X_D,
}

TABLE_HEADER = ("config", "alpha", "beta", "n", "fp_steps", "avg_inner", "rre")

_RECOVERABLE = (
    SolverBreakdownError,
    SolverDivergenceError,
    IndefiniteOperatorError,
    IndefinitePreconditionerError,
    InvalidScalingError,
)


def default_half_width(n: int, dimension: int = 1) -> int:
    """Kernel half-width scaling with the grid.

    1D out-of-focus blur uses ceil(n / 20); the 2D Gaussian benchmark uses
    the wider ceil(n / 8) (its default width sigma = m / 2 keeps the kernel
    well resolved).
    """
    return math.ceil(n / 20) if dimension == 1 else math.ceil(n / 8)


# ---------------------------------------------------------------------------
# benchmark inputs
# ---------------------------------------------------------------------------


def gen_signal_1d(n: int, m: int) -> tuple[np.ndarray, slice]:
    """Deterministic piecewise test signal sampled on an extended grid.

    The underlying function on [0, 1] rises linearly from 0.2 to 0.65 over
    [0, 0.15), carries a box of height 1.5 on [0.2, 0.35) (a jump up and a
    jump down), a linear ramp from 0.2 to 1.2 on [0.45, 0.7), and falls
    linearly from 1.3 to 0.5 over [0.8, 1], with linear interpolation
    between segments.  Both boundary values are nonzero and both boundary
    segments have strong nonzero slope: value differences separate the
    zero-padding extensions from the mirroring ones, slope differences
    separate plain reflection (which kinks the signal) from anti-reflection
    (exact on linear data).

    Returns the extended signal of length ``n + 2 m`` (sampled at cell
    midpoints) and the field-of-view slice of length ``n``.
    """
    if n < 32:
        raise ValueError(f"n must be at least 32, got {n}")
    if m < 0 or m >= n / 4:
        raise ValueError(f"half-width m={m} too large for n={n}")
    total = n + 2 * m
    x = (np.arange(1, total + 1) - 0.5) / total
    baseline_x = np.array([0.0, 0.15, 0.45, 0.70, 0.80, 1.0])
    baseline_y = np.array([0.2, 0.65, 0.2, 1.2, 1.3, 0.5])
    u = np.interp(x, baseline_x, baseline_y)
    box = (x >= 0.2) & (x < 0.35)
    u[box] = 1.5
    return u, slice(m, m + n)


def gen_image_2d(n: int, m: int) -> tuple[np.ndarray, tuple[slice, slice]]:
    """Deterministic synthetic image: gradient background, bright disk,
    rectangle.  Nonzero along every border.  Returns the extended
    ``(n + 2m) x (n + 2m)`` image and the field-of-view slices.
    """
    if n < 32:
        raise ValueError(f"n must be at least 32, got {n}")
    if m < 0 or m >= n / 4:
        raise ValueError(f"half-width m={m} too large for n={n}")
    total = n + 2 * m
    coord = (np.arange(1, total + 1) - 0.5) / total
    yy, xx = np.meshgrid(coord, coord, indexing="ij")
    img = 0.25 + 0.45 * xx + 0.20 * yy
    disk = (xx - 0.35) ** 2 + (yy - 0.40) ** 2 <= 0.18 ** 2
    img[disk] = 1.4
    rect = (xx >= 0.55) & (xx <= 0.85) & (yy >= 0.55) & (yy <= 0.80)
    img[rect] = 1.0
    fov = slice(m, m + n)
    return img, (fov, fov)


def gen_psf(kind: str, m: int, sigma: float | None = None) -> SymmetricPsf:
    """Named benchmark kernels.

    ``out_of_focus``: constant on ``|i| < m`` and zero at ``|i| = m`` (the
    strict inequality leaves zero end taps), normalized.  ``gaussian``:
    ``exp(-(i^2 + j^2) / (2 sigma^2))`` truncated to ``[-m, m]^2``,
    normalized.
    """
    if m < 1:
        raise ValueError(f"psf half-width must be >= 1, got {m}")
    if kind == "out_of_focus":
        idx = np.arange(-m, m + 1)
        h = np.where(np.abs(idx) < m, 1.0, 0.0)
        return SymmetricPsf(h / h.sum())
    if kind == "gaussian":
        if sigma is None or sigma <= 0:
            raise ValueError("gaussian psf needs sigma > 0")
        idx = np.arange(-m, m + 1, dtype=float)
        g = np.exp(-(idx[:, None] ** 2 + idx[None, :] ** 2) / (2.0 * sigma * sigma))
        return SymmetricPsf(g / g.sum())
    raise ValueError(f"unknown psf kind {kind!r}")


def blur_and_observe(u_extended: np.ndarray, psf: SymmetricPsf, n: int,
                     nsr: float, seed: int) -> np.ndarray:
    """Exact blur of the extended truth plus seeded noise at the given NSR.

    The clean observation is the valid convolution of the extended signal,
    so no boundary model enters the data.  Noise is white Gaussian rescaled
    to ``||noise|| = nsr * ||clean||`` exactly.
    """
    if nsr < 0:
        raise ValueError(f"noise-to-signal ratio must be >= 0, got {nsr}")
    u_extended = np.asarray(u_extended, dtype=float)
    h = psf.coefficients
    if psf.ndim == 1:
        clean = np.convolve(u_extended, h, mode="valid")
        expected = (n,)
    else:
        clean = convolve2d(u_extended, h, mode="valid")
        expected = (n, n)
    if clean.shape != expected:
        raise ValueError(
            f"extended input of shape {u_extended.shape} does not crop to "
            f"{expected} under half-width {psf.half_width}"
        )
    if nsr == 0:
        return clean
    rng = np.random.Generator(np.random.PCG64(seed))
    g = rng.standard_normal(clean.shape)
    noise = g * (nsr * np.linalg.norm(clean.ravel()) / np.linalg.norm(g.ravel()))
    return clean + noise


def rre(u_restored: np.ndarray, u_true: np.ndarray) -> float:
    """Relative restoration error ||u_restored - u_true|| / ||u_true||."""
    u_restored = np.asarray(u_restored, dtype=float)
    u_true = np.asarray(u_true, dtype=float)
    if u_restored.shape != u_true.shape:
        raise ValueError(
            f"shape mismatch: {u_restored.shape} vs {u_true.shape}"
        )
    denom = np.linalg.norm(u_true.ravel())
    if denom == 0:
        raise ValueError("reference signal has zero norm")
    return float(np.linalg.norm((u_restored - u_true).ravel()) / denom)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass
class BenchmarkSpec:
    """One sweep: the cross product of the listed axes, in listed order."""

    dimension: int = 1
    ns: tuple[int, ...] = (203,)
    alphas: tuple[float, ...] = (1e-3,)
    betas: tuple[float, ...] = (0.1,)
    configurations: tuple[str, ...] = ("R",)
    preconditioners: tuple[str, ...] = ("x_d",)
    nsr: float = 0.01
    seed: int = 2023
    psf_kind: str = "out_of_focus"
    psf_half_width: int | None = None  # None: ceil(n / 20)
    psf_sigma: float | None = None
    fp_tol: float | None = None       # None: 1e-3 (1D) / 1e-4 (2D)
    fp_max: int = 100
    inner_tol: float | None = None    # None: 1e-6 (1D) / 1e-5 (2D)
    inner_max: int | None = None      # None: 1000 (1D) / 2000 (2D)
    spacing: float = 1.0              # diffusion grid spacing (unit grid)
    save_restored: bool = True

    def __post_init__(self) -> None:
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.nsr < 0:
            raise ValueError("nsr must be nonnegative")
        unknown = [c for c in self.configurations if c not in CONFIGURATIONS]
        if unknown:
            raise ValueError(f"unknown configuration labels: {unknown}")
        unknown = [p for p in self.preconditioners if p not in PRECOND_SELECTORS]
        if unknown:
            raise ValueError(f"unknown preconditioner selectors: {unknown}")
        if self.dimension == 2 and self.psf_kind == "out_of_focus":
            raise ValueError("2D sweeps use the gaussian psf")

    def resolve_half_width(self, n: int) -> int:
        return self.psf_half_width if self.psf_half_width is not None \
            else default_half_width(n, self.dimension)

    def fp_tolerance(self) -> float:
        return self.fp_tol if self.fp_tol is not None else \
            (1e-3 if self.dimension == 1 else 1e-4)

    def inner_config(self) -> KrylovConfig:
        tol = self.inner_tol if self.inner_tol is not None else \
            (1e-6 if self.dimension == 1 else 1e-5)
        max_it = self.inner_max if self.inner_max is not None else \
            (1000 if self.dimension == 1 else 2000)
        return KrylovConfig(tol=tol, max_iterations=max_it)


@dataclass
class SweepCell:
    config: str
    alpha: float
    beta: float
    n: int
    preconditioner: str
    report: RestorationReport | None
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return (self.report is not None and self.report.fp_converged
                and self.report.inner_converged)

    def row(self) -> tuple:
        label = f"{self.config}/{self.preconditioner}"
        if not self.ok:
            return (label, self.alpha, self.beta, self.n, "*", "*", "*")
        rep = self.report
        return (label, self.alpha, self.beta, self.n, rep.fp_steps,
                rep.avg_inner, rep.rre)


@dataclass
class SweepResult:
    spec: BenchmarkSpec
    cells: list[SweepCell]
    alpha_opt: dict[str, float] = field(default_factory=dict)
    min_rre: dict[str, float] = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)

    def cell(self, config: str, alpha: float, beta: float, n: int,
             preconditioner: str) -> SweepCell:
        for c in self.cells:
            if (c.config == config and c.alpha == alpha and c.beta == beta
                    and c.n == n and c.preconditioner == preconditioner):
                return c
        raise KeyError((config, alpha, beta, n, preconditioner))


def make_problem(spec: BenchmarkSpec, n: int):
    """(psf, observed data, true field-of-view data) for one grid size."""
    m = spec.resolve_half_width(n)
    if spec.dimension == 1:
        psf = gen_psf("out_of_focus", m)
        extended, fov = gen_signal_1d(n, m)
        u_true = extended[fov]
    else:
        sigma = spec.psf_sigma if spec.psf_sigma is not None else max(m / 2.0, 1.0)
        psf = gen_psf("gaussian", m, sigma)
        extended, fov = gen_image_2d(n, m)
        u_true = extended[fov]
    observed = blur_and_observe(extended, psf, n, spec.nsr, spec.seed)
    return psf, observed, u_true


def run_cell(spec: BenchmarkSpec, config_label: str, alpha: float, beta: float,
             n: int, selector_label: str, problem=None) -> SweepCell:
    """Run a single sweep cell; numerical failures become starred cells."""
    bc_h, bc_l, formulation = CONFIGURATIONS[config_label]
    psf, observed, u_true = problem if problem is not None else make_problem(spec, n)
    config = RestorationConfig(
        bc_h=bc_h,
        bc_l=bc_l,
        formulation=formulation,
        preconditioner=PRECOND_SELECTORS[selector_label],
        alpha=alpha,
        beta=beta,
        fp_tol=spec.fp_tolerance(),
        fp_max=spec.fp_max,
        inner=spec.inner_config(),
        spacing=spec.spacing,
    )
    try:
        report = restore(observed, psf, config, u_true=u_true)
    except _RECOVERABLE as exc:
        return SweepCell(config_label, alpha, beta, n, selector_label,
                         report=None, failure=str(exc))
    return SweepCell(config_label, alpha, beta, n, selector_label, report=report)


def run_sweep(spec: BenchmarkSpec, out_dir=None) -> SweepResult:
    """Run every cell of the sweep and (optionally) write result files.

    Cells run in spec order and the CSV rows follow that order, so a fixed
    spec and seed give byte-identical outputs.
    """
    cells: list[SweepCell] = []
    problems = {n: make_problem(spec, n) for n in spec.ns}
    for config_label in spec.configurations:
        for n in spec.ns:
            for beta in spec.betas:
                for alpha in spec.alphas:
                    for selector in spec.preconditioners:
                        cells.append(run_cell(
                            spec, config_label, alpha, beta, n, selector,
                            problem=problems[n],
                        ))
    result = SweepResult(spec=spec, cells=cells)

    # RRE-versus-alpha summary per configuration (first n/beta/selector axis)
    for config_label in spec.configurations:
        best_alpha, best_rre = None, None
        for cell in cells:
            if cell.config != config_label or not cell.ok:
                continue
            if cell.report.rre is not None and \
                    (best_rre is None or cell.report.rre < best_rre):
                best_alpha, best_rre = cell.alpha, cell.report.rre
        if best_alpha is not None:
            result.alpha_opt[config_label] = best_alpha
            result.min_rre[config_label] = best_rre

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        result.files.extend(_write_sweep_files(spec, result, problems, out_dir))
    return result


def _cell_stem(cell: SweepCell) -> str:
    config = cell.config.replace("+", "_")
    return (f"restored_{config}_a{cell.alpha!r}_b{cell.beta!r}_n{cell.n}"
            f"_{cell.preconditioner}")


def _write_sweep_files(spec: BenchmarkSpec, result: SweepResult, problems,
                       out_dir: Path) -> list[Path]:
    files = []
    table = out_dir / "iterations.csv"
    write_csv(table, TABLE_HEADER, [cell.row() for cell in result.cells])
    files.append(table)

    curve = out_dir / "rre_vs_alpha.csv"
    rows = [
        (cell.config, cell.preconditioner, cell.alpha, cell.beta, cell.n,
         cell.report.rre if cell.ok else "*")
        for cell in result.cells
    ]
    write_csv(curve, ("config", "preconditioner", "alpha", "beta", "n", "rre"),
              rows)
    files.append(curve)

    if spec.save_restored:
        for cell in result.cells:
            if not cell.ok:
                continue
            _, _, u_true = problems[cell.n]
            stem = _cell_stem(cell)
            if spec.dimension == 1:
                path = out_dir / f"{stem}.csv"
                x = (np.arange(cell.n) + 0.5) / cell.n
                write_csv(path, ("x", "u"),
                          list(zip(x, cell.report.restored)))
            else:
                path = out_dir / f"{stem}.pgm"
                write_pgm(path, cell.report.restored,
                          lo=float(u_true.min()), hi=float(u_true.max()))
            files.append(path)
    return files


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def write_csv(path, header, rows) -> None:
    """RFC-4180-style CSV with '.' decimals and \\n line endings."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_field(x) for x in row])


def _format_field(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (np.floating,)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    return rows[0], rows[1:]


def write_pgm(path, image: np.ndarray, lo: float, hi: float) -> None:
    """8-bit binary PGM; values affinely mapped from [lo, hi] and clipped."""
    image = np.asarray(image, dtype=float)
    if hi <= lo:
        raise ValueError("affine scaling needs hi > lo")
    scaled = np.clip((image - lo) / (hi - lo) * 255.0, 0.0, 255.0)
    data = np.round(scaled).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read binary (P5) PGM files written by :func:`write_pgm`."""
    with open(path, "rb") as fh:
        buf = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(buf) and buf[pos] in b" \t\r\n":
            pos += 1
        if pos < len(buf) and buf[pos: pos + 1] == b"#":
            while pos < len(buf) and buf[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(buf) and buf[pos] not in b" \t\r\n":
            pos += 1
        tokens.append(buf[start:pos])
    if tokens[0] != b"P5":
        raise ValueError(f"not a binary PGM file: {path}")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError("only 8-bit PGM supported")
    pos += 1  # single whitespace after maxval
    data = np.frombuffer(buf, dtype=np.uint8, count=width * height, offset=pos)
    return data.reshape(height, width)


# ---------------------------------------------------------------------------
# sweep config files (key = value, comma-separated lists)
# ---------------------------------------------------------------------------

_LIST_KEYS = {"n", "alpha", "beta", "config", "precond"}


def parse_sweep_config(path) -> BenchmarkSpec:
    """Parse the plain-text sweep format: ``key = value`` lines.

    Lists are comma separated; ``#`` starts a comment.  Keys: dimension, n,
    alpha, beta, config, precond, nsr, seed, psf, psf_m, psf_sigma, fp_tol,
    fp_max, inner_tol, inner_max, save_restored.
    """
    values: dict[str, str] = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()

    def split(key: str) -> list[str]:
        return [item.strip() for item in values[key].split(",") if item.strip()]

    kwargs = {}
    if "dimension" in values:
        kwargs["dimension"] = int(values["dimension"])
    if "n" in values:
        kwargs["ns"] = tuple(int(x) for x in split("n"))
    if "alpha" in values:
        kwargs["alphas"] = tuple(float(x) for x in split("alpha"))
    if "beta" in values:
        kwargs["betas"] = tuple(float(x) for x in split("beta"))
    if "config" in values:
        kwargs["configurations"] = tuple(split("config"))
    if "precond" in values:
        kwargs["preconditioners"] = tuple(split("precond"))
    if "nsr" in values:
        kwargs["nsr"] = float(values["nsr"])
    if "seed" in values:
        kwargs["seed"] = int(values["seed"])
    if "psf" in values:
        kwargs["psf_kind"] = values["psf"]
    if "psf_m" in values:
        kwargs["psf_half_width"] = int(values["psf_m"])
    if "psf_sigma" in values:
        kwargs["psf_sigma"] = float(values["psf_sigma"])
    if "fp_tol" in values:
        kwargs["fp_tol"] = float(values["fp_tol"])
    if "fp_max" in values:
        kwargs["fp_max"] = int(values["fp_max"])
    if "inner_tol" in values:
        kwargs["inner_tol"] = float(values["inner_tol"])
    if "inner_max" in values:
        kwargs["inner_max"] = int(values["inner_max"])
    if "save_restored" in values:
        kwargs["save_restored"] = values["save_restored"].lower() in (
            "1", "true", "yes", "on",
        )
    return BenchmarkSpec(**kwargs)

"""Matrix ingestion, covariance/kernel construction, and benchmark data.

File formats: MatrixMarket (coordinate and array, general and symmetric)
and dense CSV with an optional header row. The writers serialize floats
with ``repr``, so a save/load round trip is bit exact.

Synthetic data follows a spiked model: a Hadamard basis on both sides, one
dominant singular value (100) ahead of an exponentially decaying tail, the
right basis twisted by a fixed schedule of disjoint plane rotations, plus
i.i.d. Gaussian noise. Noise is drawn as ziggurat normal variates from a
counter-based Philox generator, so datasets reproduce bit-for-bit across
platforms for a given seed.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import hadamard

from .errors import (
    DimensionNotDivisibleBy4,
    InvalidKernelParams,
    NonConvergenceWarning,
    NotPowerOfTwo,
    NotPsdWarning,
    ParseError,
    ZeroVarianceColumn,
)
from .matrix import SymmetricMatrix, symmetrize


@dataclass(frozen=True)
class DataMatrix:
    """A samples-by-features matrix with cached column means."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a nonempty 2-d array, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("data matrix contains NaN or infinite entries")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def m(self):
        return int(self.entries.shape[0])

    @property
    def n(self):
        return int(self.entries.shape[1])

    @property
    def column_means(self):
        return self.entries.mean(axis=0)


# ---------------------------------------------------------------------------
# File I/O


def _parse_float(token, lineno, column):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", lineno, column) from None


def _parse_int(token, lineno, column):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno, column) from None


def _read_matrix_market(path):
    """Dense array from a MatrixMarket file; returns (array, symmetric_flag)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket" or header[1] != "matrix":
        raise ParseError("missing '%%MatrixMarket matrix' header", 1)
    layout, dtype, shape = header[2].lower(), header[3].lower(), header[4].lower()
    if layout not in ("coordinate", "array"):
        raise ParseError(f"unsupported layout {layout!r}", 1, 3)
    if dtype not in ("real", "integer"):
        raise ParseError(f"unsupported field type {dtype!r}", 1, 4)
    if shape not in ("general", "symmetric"):
        raise ParseError(f"unsupported symmetry {shape!r}", 1, 5)

    body = [
        (i + 1, line)
        for i, line in enumerate(lines)
        if i > 0 and line.strip() and not line.lstrip().startswith("%")
    ]
    if not body:
        raise ParseError("missing size line", len(lines))
    size_lineno, size_line = body[0]
    size_tokens = size_line.split()

    if layout == "coordinate":
        if len(size_tokens) != 3:
            raise ParseError("coordinate size line needs 'rows cols nnz'", size_lineno)
        rows = _parse_int(size_tokens[0], size_lineno, 1)
        cols = _parse_int(size_tokens[1], size_lineno, 2)
        nnz = _parse_int(size_tokens[2], size_lineno, 3)
        if len(body) - 1 != nnz:
            raise ParseError(f"expected {nnz} entries, found {len(body) - 1}", size_lineno)
        arr = np.zeros((rows, cols))
        for lineno, line in body[1:]:
            tokens = line.split()
            if len(tokens) != 3:
                raise ParseError("coordinate entry needs 'i j value'", lineno)
            i = _parse_int(tokens[0], lineno, 1) - 1
            j = _parse_int(tokens[1], lineno, 2) - 1
            if not (0 <= i < rows and 0 <= j < cols):
                raise ParseError(f"index ({i + 1}, {j + 1}) out of range", lineno)
            value = _parse_float(tokens[2], lineno, 3)
            arr[i, j] = value
            if shape == "symmetric":
                arr[j, i] = value
        return arr, shape == "symmetric"

    if len(size_tokens) != 2:
        raise ParseError("array size line needs 'rows cols'", size_lineno)
    rows = _parse_int(size_tokens[0], size_lineno, 1)
    cols = _parse_int(size_tokens[1], size_lineno, 2)
    values = []
    for lineno, line in body[1:]:
        for column, token in enumerate(line.split(), start=1):
            values.append(_parse_float(token, lineno, column))
    if shape == "symmetric":
        if rows != cols:
            raise ParseError("symmetric array must be square", size_lineno)
        expected = rows * (rows + 1) // 2
        if len(values) != expected:
            raise ParseError(f"expected {expected} lower-triangle values, found {len(values)}",
                             size_lineno)
        arr = np.zeros((rows, cols))
        pos = 0
        for j in range(cols):  # column-major lower triangle
            for i in range(j, rows):
                arr[i, j] = values[pos]
                arr[j, i] = values[pos]
                pos += 1
        return arr, True
    if len(values) != rows * cols:
        raise ParseError(f"expected {rows * cols} values, found {len(values)}", size_lineno)
    return np.array(values).reshape((cols, rows)).T, False  # column-major


def _read_csv(path):
    lines = Path(path).read_text().splitlines()
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        tokens = [t.strip() for t in line.split(",")]
        if lineno == 1:
            try:
                [float(t) for t in tokens]
            except ValueError:
                continue  # header row
        rows.append([_parse_float(t, lineno, c + 1) for c, t in enumerate(tokens)])
    if not rows:
        raise ParseError("no data rows", max(len(lines), 1))
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"row has {len(row)} columns, expected {width}", i + 1)
    return np.array(rows)


def _sniff_format(path, fmt):
    if fmt is not None:
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix in (".mtx", ".mm"):
        return "matrix_market"
    if suffix == ".csv":
        return "dense_csv"
    raise ValueError(f"cannot infer format from {path!r}; pass format explicitly")


def load_matrix(path, format=None, kind="symmetric", symmetry_tol=1e-8):
    """Load a matrix file as a :class:`SymmetricMatrix` or :class:`DataMatrix`.

    ``kind="symmetric"`` routes through :func:`symmetrize` (MatrixMarket
    symmetric storage is expanded to full first); ``kind="data"`` returns
    the raw rectangle.
    """
    fmt = _sniff_format(path, format)
    if fmt == "matrix_market":
        arr, _ = _read_matrix_market(path)
    elif fmt == "dense_csv":
        arr = _read_csv(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if kind == "symmetric":
        return symmetrize(arr, symmetry_tol)
    if kind == "data":
        return DataMatrix(arr)
    raise ValueError(f"unknown kind {kind!r}")


def save_matrix(path, matrix, format=None, metadata=None):
    """Write a matrix to disk, bit-exactly recoverable by :func:`load_matrix`.

    ``matrix`` may be a SymmetricMatrix, DataMatrix, or plain 2-d array.
    When ``metadata`` is given, a JSON sidecar is written next to the file.
    """
    if isinstance(matrix, SymmetricMatrix):
        arr = matrix.entries
    elif isinstance(matrix, DataMatrix):
        arr = matrix.entries
    else:
        arr = np.asarray(matrix, dtype=float)
    fmt = _sniff_format(path, format)
    path = Path(path)
    if fmt == "matrix_market":
        rows, cols = arr.shape
        out = ["%%MatrixMarket matrix array real general", f"{rows} {cols}"]
        for j in range(cols):  # column-major per the array layout
            out.extend(repr(float(arr[i, j])) for i in range(rows))
        path.write_text("\n".join(out) + "\n")
    elif fmt == "dense_csv":
        path.write_text(
            "\n".join(",".join(repr(float(v)) for v in row) for row in arr) + "\n"
        )
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if metadata is not None:
        sidecar = path.with_name(path.name + ".meta.json")
        sidecar.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Covariance / correlation / kernels


def unit_row_normalize(A: SymmetricMatrix, max_iters=25, tol=1e-8) -> SymmetricMatrix:
    """Symmetric iterative scaling toward unit Euclidean row norms.

    Repeats ``A <- D^{-1/2} A D^{-1/2}`` with D the diagonal of row norms;
    the congruence keeps the matrix PSD. Warns with
    :class:`NonConvergenceWarning` if the deviation is still above ``tol``
    after ``max_iters`` sweeps.
    """
    entries = A.entries.copy()
    deviation = np.inf
    for _ in range(max_iters):
        norms = np.linalg.norm(entries, axis=1)
        deviation = float(np.abs(norms - 1.0).max())
        if deviation <= tol:
            break
        if np.any(norms <= 0):
            raise ZeroVarianceColumn("cannot normalize a matrix with a zero row")
        scale = 1.0 / np.sqrt(norms)
        entries = entries * scale[:, None] * scale[None, :]
    else:
        norms = np.linalg.norm(entries, axis=1)
        deviation = float(np.abs(norms - 1.0).max())
        if deviation > tol:
            warnings.warn(
                f"row normalization stopped at deviation {deviation:.3e} after "
                f"{max_iters} iterations",
                NonConvergenceWarning,
            )
    return symmetrize(entries, symmetry_tol=1e-12)


def covariance_from_data(
    X: DataMatrix, center=True, to_correlation=False, unit_row_norm=False
) -> SymmetricMatrix:
    """Sample covariance ``X_c.T X_c / (m - 1)`` with optional rescalings.

    ``to_correlation`` divides rows and columns by the standard deviations
    (unit diagonal exactly); ``unit_row_norm`` applies
    :func:`unit_row_normalize` afterwards.
    """
    entries = X.entries
    if center:
        if X.m < 2:
            raise ValueError("centering requires at least two samples")
        entries = entries - X.column_means
    denom = max(X.m - 1, 1)
    cov = entries.T @ entries / denom
    if to_correlation:
        diag = np.diag(cov).copy()
        if np.any(diag <= 0):
            raise ZeroVarianceColumn(
                f"column {int(np.argmin(diag))} has zero variance"
            )
        scale = 1.0 / np.sqrt(diag)
        cov = cov * scale[:, None] * scale[None, :]
        np.fill_diagonal(cov, 1.0)
    A = symmetrize(cov, symmetry_tol=1e-10)
    if unit_row_norm:
        A = unit_row_normalize(A)
    return A


def kernel_matrix(
    X: DataMatrix,
    kernel="linear",
    degree=2,
    c=1.0,
    gamma=None,
    center_in_feature_space=False,
) -> SymmetricMatrix:
    """Gram matrix over the rows of X for a named kernel.

    All m^2 entries are evaluated explicitly. ``rbf`` uses
    ``exp(-gamma ||x_i - x_j||^2)``; ``polynomial`` uses
    ``(<x_i, x_j> + c) ** degree``. Optional double centering maps the
    implicit features to zero mean.
    """
    G = X.entries @ X.entries.T
    if kernel == "linear":
        K = G
    elif kernel == "polynomial":
        if degree < 1 or int(degree) != degree:
            raise InvalidKernelParams(f"degree must be a positive integer, got {degree}")
        K = (G + c) ** int(degree)
    elif kernel == "rbf":
        if gamma is None or gamma <= 0:
            raise InvalidKernelParams(f"rbf requires gamma > 0, got {gamma}")
        sq = np.diag(G)
        dist2 = sq[:, None] + sq[None, :] - 2.0 * G
        K = np.exp(-gamma * np.maximum(dist2, 0.0))
    else:
        raise InvalidKernelParams(f"unknown kernel {kernel!r}")
    if center_in_feature_space:
        m = K.shape[0]
        ones = np.full((m, m), 1.0 / m)
        K = K - ones @ K - K @ ones + ones @ K @ ones
    out = symmetrize(K, symmetry_tol=1e-8)
    # user-supplied parameters can produce an invalid (indefinite) kernel;
    # flag it rather than fail, since downstream solvers validate again
    w = np.linalg.eigvalsh(out.entries)
    if w[0] < -1e-8 * max(abs(w[0]), abs(w[-1]), 1e-300):
        warnings.warn(
            f"kernel matrix is not PSD (min eigenvalue {w[0]:.3e})", NotPsdWarning
        )
    return out


# ---------------------------------------------------------------------------
# Synthetic spiked model


def hadamard_basis(p: int) -> np.ndarray:
    """Sylvester Hadamard matrix scaled by p^(-1/2): orthonormal columns."""
    if p < 1 or p & (p - 1) != 0:
        raise NotPowerOfTwo(f"p={p} is not a power of two")
    return hadamard(p).astype(float) / math.sqrt(p)


def givens_composition_apply(vtilde: np.ndarray, theta: float) -> np.ndarray:
    """Apply the fixed schedule of disjoint plane rotations to a basis.

    The 1-indexed plane pairs are (n/2 + 2t - 1, n/2 + 2t) for
    t = 1 .. n/4, which tile the bottom half of the rows; because the pairs
    are disjoint, the composition order is immaterial. theta = 0 returns the
    input unchanged.
    """
    vtilde = np.asarray(vtilde, dtype=float)
    n = vtilde.shape[0]
    if vtilde.ndim != 2 or vtilde.shape[1] != n:
        raise ValueError("expected a square matrix")
    if n % 4 != 0:
        raise DimensionNotDivisibleBy4(f"n={n} is not divisible by 4")
    out = vtilde.copy()
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    for t in range(1, n // 4 + 1):
        a = n // 2 + 2 * t - 2  # 0-indexed row i_t = n/2 + 2t - 1
        b = a + 1
        row_a = cos_t * out[a] - sin_t * out[b]
        row_b = sin_t * out[a] + cos_t * out[b]
        out[a] = row_a
        out[b] = row_b
    return out


@dataclass(frozen=True)
class SyntheticConfig:
    """Spiked-model parameters: sizes, rotation angle, noise scale, seed."""

    m: int
    n: int
    theta: float = 0.27 * math.pi
    sigma: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        for label, p in (("m", self.m), ("n", self.n)):
            if p < 1 or p & (p - 1) != 0:
                raise NotPowerOfTwo(f"{label}={p} is not a power of two")
        if self.n < 4:
            raise ValueError("n must be at least 4 for the rotation schedule")
        if self.m > self.n:
            raise ValueError("the singular-value block requires m <= n")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def synthetic_spiked(cfg: SyntheticConfig) -> DataMatrix:
    """Sample the spiked model X = U S V.T + noise.

    U is the m-dimensional Hadamard basis; the diagonal of S is
    (100, e^-2, e^-3, ..., e^-m) padded with zero columns; V is the
    n-dimensional Hadamard basis twisted by the rotation schedule. With
    sigma = 0 the singular values of X are exactly the diagonal of S.
    """
    left = hadamard_basis(cfg.m)
    right = givens_composition_apply(hadamard_basis(cfg.n), cfg.theta)
    spectrum = np.exp(-np.arange(1, cfg.m + 1, dtype=float))
    spectrum[0] = 100.0
    core = (left * spectrum) @ right[:, : cfg.m].T  # U @ diag(s) @ V[:, :m].T
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    noise = cfg.sigma * rng.standard_normal((cfg.m, cfg.n)) if cfg.sigma > 0 else 0.0
    return DataMatrix(core + noise)


# ---------------------------------------------------------------------------
# Pit props benchmark

PIT_PROPS_VARIABLES = (
    "topdiam", "length", "moist", "testsg", "ovensg", "ringtop", "ringbut",
    "bowmax", "bowdist", "whorls", "clear", "knots", "diaknot",
)

# Correlation matrix of the 13 pit props variables (Jeffers, 1967; 180
# observations), lower triangle by row in the variable order above.
_PIT_PROPS_LOWER = (
    (1.0,),
    (0.954, 1.0),
    (0.364, 0.297, 1.0),
    (0.342, 0.284, 0.882, 1.0),
    (-0.129, -0.118, -0.148, 0.220, 1.0),
    (0.313, 0.291, 0.153, 0.381, 0.364, 1.0),
    (0.496, 0.503, -0.029, 0.174, 0.296, 0.813, 1.0),
    (0.424, 0.419, -0.054, -0.059, 0.004, 0.090, 0.372, 1.0),
    (0.592, 0.648, 0.125, 0.137, -0.039, 0.211, 0.465, 0.482, 1.0),
    (0.545, 0.569, -0.081, -0.014, 0.037, 0.274, 0.679, 0.557, 0.526, 1.0),
    (0.084, 0.076, 0.162, 0.097, 0.091, -0.036, -0.113, 0.061, 0.085, -0.319, 1.0),
    (-0.019, -0.036, 0.220, 0.169, -0.145, 0.024, -0.232, -0.357, -0.127, -0.368, 0.029, 1.0),
    (0.134, 0.144, 0.126, 0.015, -0.208, -0.329, -0.424, -0.202, -0.076, -0.291, 0.007, 0.184, 1.0),
)


def pit_props() -> SymmetricMatrix:
    """The 13x13 pit props correlation matrix (unit diagonal, trace 13)."""
    n = len(PIT_PROPS_VARIABLES)
    arr = np.zeros((n, n))
    for i, row in enumerate(_PIT_PROPS_LOWER):
        for j, value in enumerate(row):
            arr[i, j] = value
            arr[j, i] = value
    return symmetrize(arr, symmetry_tol=0.0)

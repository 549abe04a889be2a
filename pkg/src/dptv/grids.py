"""Scalar and vector fields on regular Cartesian grids.

Images and 1D signals are plain float64 arrays of shape (M, N); 1D signals
are column grids of shape (M, 1). Vector fields (dual variables, discrete
gradients) are arrays of shape (2, M, N) holding the two difference
components per node.

The discrete gradient uses forward differences with homogeneous entries on
the last row/column, and ``divergence`` is built so that the adjoint
identity <grad u, p> = -<u, div p> holds exactly in exact arithmetic. This
is the operator pair required by primal-dual TV solvers: the dual of the
gradient is minus the divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

__all__ = [
    "as_field",
    "gradient",
    "divergence",
    "gradient_norm_sq_bound",
    "gradient_norm_bound",
    "inner",
    "norm2",
    "mollify",
    "NoiseSpec",
    "add_gaussian_noise",
]


def as_field(u, name: str = "field") -> np.ndarray:
    """Validate and return a grid function as a C-contiguous float64 array.

    Accepts 1D arrays (promoted to M x 1 column grids) and 2D arrays.
    Raises ValueError on empty or non-finite input.
    """
    arr = np.asarray(u, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 2D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return np.ascontiguousarray(arr)


def gradient(u: np.ndarray, h: float = 1.0) -> np.ndarray:
    """Discrete gradient by forward differences, divided by the spacing h.

    Returns an array of shape (2, M, N). The first component is zero on the
    last row and the second component is zero on the last column, so that
    for column grids (N = 1) the second component vanishes identically.
    """
    m, n = u.shape
    p = np.zeros((2, m, n), dtype=np.float64)
    p[0, : m - 1, :] = (u[1:, :] - u[: m - 1, :]) / h
    if n > 1:
        p[1, :, : n - 1] = (u[:, 1:] - u[:, : n - 1]) / h
    return p


def divergence(p: np.ndarray, h: float = 1.0) -> np.ndarray:
    """Discrete divergence, the exact negative adjoint of ``gradient``.

    Backward differences with the boundary convention induced by
    adjointness: the first/last rows (columns) keep/drop the one-sided
    terms so that <grad u, p> = -<u, div p> for every u and p. Entries of
    p sitting in the gradient's zeroed slots are ignored.
    """
    _, m, n = p.shape
    out = np.zeros((m, n), dtype=np.float64)
    out[: m - 1, :] += p[0, : m - 1, :]
    out[1:, :] -= p[0, : m - 1, :]
    if n > 1:
        out[:, : n - 1] += p[1, :, : n - 1]
        out[:, 1:] -= p[1, :, : n - 1]
    out /= h
    return out


def gradient_norm_sq_bound(h: float = 1.0) -> float:
    """Upper bound 8 / h**2 on the squared operator norm of ``gradient``.

    This is the constant used to validate primal-dual step sizes through
    tau * sigma * L**2 < 1. Reading 8/h**2 as a bound on the norm itself
    (rather than its square) is also seen; that looser reading is exposed
    as ``gradient_norm_bound`` but is not used for validation.
    """
    if h <= 0:
        raise ValueError("grid spacing h must be positive")
    return 8.0 / (h * h)


def gradient_norm_bound(h: float = 1.0) -> float:
    """Bound sqrt(8)/h on the operator norm of ``gradient`` itself."""
    return math.sqrt(gradient_norm_sq_bound(h))


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Inner product with a fixed (row-major) summation order.

    Works for scalar fields and stacked vector fields alike. Avoids BLAS
    reductions so the result is bit-reproducible across runs and thread
    counts.
    """
    return float(np.sum(np.ascontiguousarray(a) * np.ascontiguousarray(b)))


def norm2(a: np.ndarray) -> float:
    """Euclidean norm with the same fixed-order reduction as ``inner``."""
    return math.sqrt(inner(a, a))


def _segment_kernel(r: float) -> np.ndarray:
    rad = int(math.floor(r))
    k = np.ones(2 * rad + 1, dtype=np.float64)
    return k / k.sum()


def _disk_kernel(r: float) -> np.ndarray:
    rad = int(math.floor(r))
    offs = np.arange(-rad, rad + 1)
    di, dj = np.meshgrid(offs, offs, indexing="ij")
    k = (di * di + dj * dj <= r * r).astype(np.float64)
    return k / k.sum()


def mollify(u: np.ndarray, r: float) -> np.ndarray:
    """Convolve with the normalized indicator of the radius-r discrete ball.

    The kernel contains all integer offsets with Euclidean length <= r, so
    r < 1 degenerates to the identity. Column/row grids use the 1D segment
    kernel along their long axis. Boundaries replicate the edge values,
    which keeps the averages well-normalized up to the border.
    """
    if r < 0:
        raise ValueError("mollification radius must be nonnegative")
    if r < 1:
        return u.copy()
    m, n = u.shape
    if n == 1:
        kernel = _segment_kernel(r)[:, None]
    elif m == 1:
        kernel = _segment_kernel(r)[None, :]
    else:
        kernel = _disk_kernel(r)
    return ndimage.convolve(u, kernel, mode="nearest")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian noise: standard deviation in image units plus seed."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("noise sigma must be nonnegative")


def add_gaussian_noise(u: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Return u plus i.i.d. Gaussian(0, sigma^2) noise from a seeded PCG64.

    The same (seed, sigma, shape) always reproduces bit-identical output.
    Values are deliberately not clamped to [0, 1]: clamping would bias the
    effective noise level near the range boundaries.
    """
    if spec.sigma == 0:
        return u.copy()
    rng = np.random.default_rng(spec.seed)
    return u + spec.sigma * rng.standard_normal(u.shape)

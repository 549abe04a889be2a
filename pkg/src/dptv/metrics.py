"""Quality metrics comparing reconstructions to reference images.

The staircasing proxy is the normalized TV distance: total variation of
the error divided by the total variation of the original. Accuracy is
tracked by the normalized L2 distance, PSNR (peak 1 for [0,1]-normalized
images) and mean SSIM with the canonical 11-point Gaussian window.
All reductions are fixed-order and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grids import gradient, norm2

__all__ = [
    "MetricReport",
    "d_tv_image",
    "d_l2_image",
    "psnr",
    "ssim",
    "compute_metrics",
    "CSV_HEADER",
    "format_metric_row",
]

CSV_HEADER = "model,lambda,sigma,alpha,a,b,r,d_l2_noisy,d_tv,d_l2,psnr,ssim,iterations,converged"


def total_variation(u: np.ndarray, h: float = 1.0) -> float:
    """Isotropic discrete TV: sum of Euclidean gradient magnitudes."""
    p = gradient(u, h)
    return float(np.sum(np.sqrt(p[0] * p[0] + p[1] * p[1])))


def _check_shapes(result: np.ndarray, original: np.ndarray) -> None:
    if result.shape != original.shape:
        raise ValueError(
            f"shape mismatch: result {result.shape} vs original {original.shape}"
        )


def d_tv_image(result: np.ndarray, original: np.ndarray, h: float = 1.0) -> float:
    """Normalized TV distance TV(result - original) / TV(original)."""
    _check_shapes(result, original)
    denom = total_variation(original, h)
    if denom == 0:
        raise ValueError("original image has zero total variation")
    return total_variation(result - original, h) / denom


def d_l2_image(result: np.ndarray, original: np.ndarray) -> float:
    """Normalized L2 distance ||result - original|| / ||original||."""
    _check_shapes(result, original)
    denom = norm2(original)
    if denom == 0:
        raise ValueError("original image has zero L2 norm")
    return norm2(result - original) / denom


def psnr(result: np.ndarray, original: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with peak value 1.

    Returns +inf when the images are identical (zero mean squared error).
    """
    _check_shapes(result, original)
    diff = result - original
    mse = float(np.mean(diff * diff))
    if mse == 0:
        return float("inf")
    return -10.0 * math.log10(mse)


def _ssim_window(length: int, sigma: float) -> np.ndarray:
    x = np.arange(length, dtype=np.float64) - (length - 1) / 2.0
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _window_mean(x: np.ndarray, kernel: np.ndarray, axes: tuple[int, ...],
                 half: int) -> np.ndarray:
    out = x
    for ax in axes:
        out = ndimage.correlate1d(out, kernel, axis=ax, mode="constant")
    crop = [slice(None)] * x.ndim
    for ax in axes:
        crop[ax] = slice(half, -half)
    return out[tuple(crop)]


def ssim(
    result: np.ndarray,
    original: np.ndarray,
    window: int = 11,
    window_sigma: float = 1.5,
    k1: float = 0.01,
    k2: float = 0.03,
    data_range: float = 1.0,
) -> float:
    """Mean structural similarity over windows fully inside the grid.

    Gaussian window (default 11 taps, sigma 1.5), stability constants
    C1 = (k1*L)^2 and C2 = (k2*L)^2 with dynamic range L. Column/row grids
    use the 1D window of the same length. Raises ValueError when the grid
    is smaller than the window.
    """
    _check_shapes(result, original)
    m, n = result.shape
    if n == 1 or m == 1:
        axes = (0,) if n == 1 else (1,)
    else:
        axes = (0, 1)
    for ax in axes:
        if result.shape[ax] < window:
            raise ValueError(
                f"grid extent {result.shape[ax]} along axis {ax} is smaller "
                f"than the {window}-point window"
            )

    kern = _ssim_window(window, window_sigma)
    half = window // 2
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2

    mu_a = _window_mean(result, kern, axes, half)
    mu_b = _window_mean(original, kern, axes, half)
    var_a = _window_mean(result * result, kern, axes, half) - mu_a * mu_a
    var_b = _window_mean(original * original, kern, axes, half) - mu_b * mu_b
    cov = _window_mean(result * original, kern, axes, half) - mu_a * mu_b

    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


@dataclass
class MetricReport:
    """Metric values of one reconstruction against its references."""

    d_tv: float
    d_l2: float
    psnr: float
    ssim: float
    d_l2_noisy: float | None = None


def compute_metrics(
    result: np.ndarray,
    original: np.ndarray,
    noisy: np.ndarray | None = None,
    h: float = 1.0,
) -> MetricReport:
    """Evaluate all metrics; d_l2_noisy is filled when the datum is given."""
    return MetricReport(
        d_tv=d_tv_image(result, original, h),
        d_l2=d_l2_image(result, original),
        psnr=psnr(result, original),
        ssim=ssim(result, original),
        d_l2_noisy=None if noisy is None else d_l2_image(result, noisy),
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.10g}"
    return str(value)


def format_metric_row(
    model: str,
    lam: float | None,
    sigma: float | None,
    alpha: float | None,
    a: float | None,
    b: float | None,
    r: float | None,
    report: MetricReport,
    iterations: int,
    converged: bool,
) -> str:
    """One CSV row in the ``CSV_HEADER`` schema (no trailing newline)."""
    fields = [
        model,
        _fmt(lam),
        _fmt(sigma),
        _fmt(alpha),
        _fmt(a),
        _fmt(b),
        _fmt(r),
        _fmt(report.d_l2_noisy),
        _fmt(report.d_tv),
        _fmt(report.d_l2),
        _fmt(report.psnr),
        _fmt(report.ssim),
        str(iterations),
        _fmt(converged),
    ]
    return ",".join(fields)

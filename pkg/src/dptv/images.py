"""Grayscale image I/O and synthetic test signals.

Files are 8-bit only: binary PGM (P5) written bit-exactly as
``P5\\n<W> <H>\\n255\\n`` plus row-major raster bytes, and 8-bit grayscale
PNG via Pillow. Loaded values map to [0,1] through v/255; saving clamps
to [0,1] and quantizes with round(255*v). Color PNG input is reduced to
grayscale by averaging the RGB channels.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .grids import as_field

__all__ = [
    "ImageFormatError",
    "MalformedImageError",
    "UnsupportedDepthError",
    "load_image",
    "save_image",
    "make_synthetic",
    "SYNTHETIC_KINDS",
]

SYNTHETIC_KINDS = ("saw", "step", "double_gradient")

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ImageFormatError(ValueError):
    """Base class for unreadable image files."""


class MalformedImageError(ImageFormatError):
    """Header or raster data does not parse."""


class UnsupportedDepthError(ImageFormatError):
    """Image is not 8 bits per sample."""


def _parse_pgm(data: bytes, path: str) -> np.ndarray:
    pos = 2  # past the magic
    values = []
    while len(values) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise MalformedImageError(f"{path}: malformed PGM header")
        values.append(int(token))
    width, height, maxval = values
    if width < 1 or height < 1:
        raise MalformedImageError(f"{path}: malformed PGM header")
    if maxval != 255:
        raise UnsupportedDepthError(f"{path}: PGM maxval {maxval}, only 255 supported")
    pos += 1  # the single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise MalformedImageError(f"{path}: truncated PGM raster")
    arr = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return arr.astype(np.float64) / 255.0


def _load_png(path: str) -> np.ndarray:
    try:
        img = Image.open(path)
        img.load()
    except Exception as exc:
        raise MalformedImageError(f"{path}: unreadable PNG ({exc})") from exc
    if img.mode in ("I", "I;16", "I;16B", "I;16L", "F"):
        raise UnsupportedDepthError(f"{path}: PNG mode {img.mode}, only 8-bit supported")
    if img.mode == "L":
        arr = np.asarray(img, dtype=np.float64)
    else:
        rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
        arr = rgb.mean(axis=2)
    return arr / 255.0


def load_image(path) -> np.ndarray:
    """Load a grayscale image as an (M, N) field with values in [0, 1].

    The format is detected from the file magic. Raises FileNotFoundError
    for missing files, MalformedImageError for unparseable content and
    UnsupportedDepthError for non-8-bit data.
    """
    path = str(path)
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] == b"P5":
        return _parse_pgm(data, path)
    if data[: len(_PNG_MAGIC)] == _PNG_MAGIC:
        return _load_png(path)
    raise MalformedImageError(f"{path}: not a binary PGM or PNG file")


def _quantize(field: np.ndarray) -> np.ndarray:
    return np.rint(255.0 * np.clip(field, 0.0, 1.0)).astype(np.uint8)


def save_image(field: np.ndarray, path, fmt: str | None = None) -> None:
    """Clamp to [0,1], quantize to 8 bits and write PGM or PNG.

    The format comes from ``fmt`` ("pgm"/"png") or, if omitted, the file
    extension. Output bytes are deterministic for fixed input.
    """
    field = as_field(field)
    path = str(path)
    if fmt is None:
        lower = path.lower()
        if lower.endswith(".pgm"):
            fmt = "pgm"
        elif lower.endswith(".png"):
            fmt = "png"
        else:
            raise ValueError(f"{path}: cannot infer format, pass fmt='pgm' or 'png'")
    arr = _quantize(field)
    if fmt == "pgm":
        height, width = arr.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            fh.write(arr.tobytes(order="C"))
    elif fmt == "png":
        Image.fromarray(arr, mode="L").save(path, format="PNG")
    else:
        raise ValueError(f"unknown image format {fmt!r}")


_SAW_JUMP_HEIGHTS = (0.5, 0.3, 0.2)


def _saw(size: int, n_jumps: int, ramp_rise: float = 0.01) -> np.ndarray:
    """Piecewise-linear signal with n_jumps discontinuities of cycling size.

    Segments ramp gently toward the opposite half of [0,1]; at each
    breakpoint the value jumps by the next height in the cycle, upward
    from the lower half and downward from the upper half. Keeps all
    values inside [0, 1].
    """
    bounds = np.rint(np.linspace(0, size, n_jumps + 2)).astype(int)
    out = np.empty(size, dtype=np.float64)
    v = 0.05
    for s in range(n_jumps + 1):
        i0, i1 = bounds[s], bounds[s + 1]
        target = v + (ramp_rise if v <= 0.5 else -ramp_rise)
        out[i0:i1] = np.linspace(v, target, i1 - i0)
        v = target
        if s < n_jumps:
            jump = _SAW_JUMP_HEIGHTS[s % len(_SAW_JUMP_HEIGHTS)]
            v = v + jump if v <= 0.5 else v - jump
    return out[:, None]


def _step(size: int) -> np.ndarray:
    out = np.zeros(size, dtype=np.float64)
    out[size // 2 :] = 1.0
    return out[:, None]


def _double_gradient(size: int) -> np.ndarray:
    """Nested smooth ramps, the structure TV denoising staircases most.

    Outer region: exactly linear horizontal ramp. Centered inner square:
    vertical ramp, so the contrast of its edges varies along the border
    and nearly vanishes where the two ramps take equal values.
    """
    img = np.tile(np.linspace(0.1, 0.9, size), (size, 1))
    q0, q1 = size // 4, size - size // 4
    img[q0:q1, q0:q1] = np.linspace(0.2, 0.8, q1 - q0)[:, None]
    return img


def make_synthetic(kind: str, size: int, n_jumps: int = 6) -> np.ndarray:
    """Generate a synthetic test field; 1D kinds return (size, 1) grids.

    Kinds: 'saw' (1D, jumps of several sizes joined by linear ramps),
    'step' (1D, single 0 -> 1 jump at the midpoint), 'double_gradient'
    (2D, nested ramps plus a flat core). Values lie in [0, 1]. size must
    be at least 16.
    """
    if kind not in SYNTHETIC_KINDS:
        raise ValueError(f"unknown synthetic kind {kind!r}")
    if size < 16:
        raise ValueError("synthetic size must be at least 16")
    if kind == "saw":
        if n_jumps < 1 or size < 2 * (n_jumps + 2):
            raise ValueError("size too small for the requested jump count")
        return _saw(size, n_jumps)
    if kind == "step":
        return _step(size)
    return _double_gradient(size)

"""Construction of the spatial weight for the double-phase regularizer.

The weight field w marks where the regularizer is allowed quadratic
growth: w = 0 near strong edges (the model keeps pure TV behavior there)
and w > 0 in smooth regions (extra diffusion suppresses staircasing). It
is obtained by applying a nonincreasing, compactly supported cutoff
profile W to a gradient-magnitude field, computed either from a TV
pre-solve of the datum (the adaptive pipeline) or from the mollified
noisy datum directly (the cheap variant).

Three cutoff families are provided:

  w1: max(0, a - b * max(x, a/(2b)))   plateau a/2, zero from a/b on
  w2: max(0, a - b*x)                  linear, zero from a/b on
  w3: height on [0, cutoff], else 0    hard indicator
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grids import gradient, mollify
from .prox import TV, FidelityParams
from .solver import SolveResult, SolverConfig, solve

__all__ = [
    "WeightSpec",
    "WeightBuildReport",
    "eval_weight_function",
    "rescale_weight_spec",
    "build_weight_adaptive",
    "build_weight_noisy",
]

FAMILIES = ("w1", "w2", "w3")


@dataclass(frozen=True)
class WeightSpec:
    """Cutoff family, its parameters, and the mollification radius.

    Families w1/w2 take slope parameters (a, b); w3 takes (height,
    cutoff). ``radius`` is the mollification radius in pixels applied to
    the field before its gradient enters the cutoff (0 disables it;
    useful values are small, a few pixels).
    """

    family: str
    a: float | None = None
    b: float | None = None
    height: float | None = None
    cutoff: float | None = None
    radius: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        if self.family in ("w1", "w2"):
            if self.a is None or self.b is None or self.a <= 0 or self.b <= 0:
                raise ValueError(f"family {self.family} requires a > 0 and b > 0")
        else:
            if (
                self.height is None
                or self.cutoff is None
                or self.height <= 0
                or self.cutoff <= 0
            ):
                raise ValueError("family w3 requires height > 0 and cutoff > 0")
        if self.radius < 0:
            raise ValueError("mollification radius must be nonnegative")

    @property
    def w0(self) -> float:
        """Value of the cutoff at zero gradient."""
        return float(eval_weight_function(self, 0.0))

    @property
    def support_end(self) -> float:
        """Smallest x beyond which the cutoff vanishes."""
        if self.family == "w3":
            return float(self.cutoff)
        return float(self.a / self.b)


def eval_weight_function(spec: WeightSpec, x) -> np.ndarray:
    """Evaluate the cutoff profile at nonnegative gradient magnitudes x."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("cutoff argument must be nonnegative")
    if spec.family == "w1":
        return np.maximum(0.0, spec.a - spec.b * np.maximum(x, spec.a / (2.0 * spec.b)))
    if spec.family == "w2":
        return np.maximum(0.0, spec.a - spec.b * x)
    return np.where(x <= spec.cutoff, spec.height, 0.0)


def rescale_weight_spec(spec: WeightSpec, alpha: float, beta: float) -> WeightSpec:
    """Spec whose profile is x -> alpha * W(beta * x), in the same family.

    Resolution changes rescale gradient magnitudes, so the cutoff must be
    rescaled with them: w1/w2 map (a, b) to (alpha*a, alpha*beta*b), w3
    maps (height, cutoff) to (alpha*height, cutoff/beta).
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("rescaling factors must be positive")
    if spec.family == "w3":
        return replace(spec, height=alpha * spec.height, cutoff=spec.cutoff / beta)
    return replace(spec, a=alpha * spec.a, b=alpha * beta * spec.b)


@dataclass
class WeightBuildReport:
    """Diagnostics of one weight construction."""

    spec: WeightSpec
    max_gradient: float
    support_fraction: float
    rof_iterations: int | None = None
    rof_residual: float | None = None
    rof_converged: bool | None = None


def _weight_from_field(field: np.ndarray, spec: WeightSpec, h: float,
                       mollify_gradient: bool) -> tuple[np.ndarray, np.ndarray]:
    """Shared tail: mollify, take the gradient magnitude, apply the cutoff."""
    if mollify_gradient:
        p = gradient(field, h)
        mag = mollify(np.sqrt(p[0] * p[0] + p[1] * p[1]), spec.radius)
    else:
        smooth = mollify(field, spec.radius)
        p = gradient(smooth, h)
        mag = np.sqrt(p[0] * p[0] + p[1] * p[1])
    return eval_weight_function(spec, mag), mag


def build_weight_adaptive(
    g: np.ndarray,
    lam: float,
    spec: WeightSpec,
    cfg: SolverConfig,
    h: float = 1.0,
    mollify_gradient: bool = False,
    rof_lam: float | None = None,
) -> tuple[np.ndarray, np.ndarray, WeightBuildReport]:
    """Weight from a TV pre-solve of the datum.

    Solves the classical TV problem for (g, lam), mollifies the solution
    with the spec radius, and applies the cutoff to its gradient
    magnitude. Returns (w, u_tv, report). A non-converged pre-solve is
    flagged in the report but still yields a weight from the last
    iterate. ``mollify_gradient`` switches to smoothing the gradient
    magnitude instead of the field itself; ``rof_lam`` overrides the
    pre-solve fidelity weight.
    """
    fid = FidelityParams(lam if rof_lam is None else rof_lam, g)
    result: SolveResult = solve(fid, TV(), cfg, h)
    w, mag = _weight_from_field(result.u, spec, h, mollify_gradient)
    report = WeightBuildReport(
        spec=spec,
        max_gradient=float(mag.max()),
        support_fraction=float(np.mean(w > 0)),
        rof_iterations=result.iterations,
        rof_residual=result.residual,
        rof_converged=result.converged,
    )
    return w, result.u, report


def build_weight_noisy(
    g: np.ndarray,
    spec: WeightSpec,
    h: float = 1.0,
    mollify_gradient: bool = False,
) -> tuple[np.ndarray, WeightBuildReport]:
    """Weight computed directly from the mollified noisy datum (no pre-solve)."""
    w, mag = _weight_from_field(g, spec, h, mollify_gradient)
    report = WeightBuildReport(
        spec=spec,
        max_gradient=float(mag.max()),
        support_fraction=float(np.mean(w > 0)),
    )
    return w, report

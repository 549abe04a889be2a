"""Standard and accelerated Chambolle-Pock iterations for K = gradient.

Both variants alternate the dual resolvent (on the regularizer conjugate),
the primal resolvent (on the quadratic fidelity) and an extrapolation step.
The accelerated variant additionally rescales the step sizes each
iteration using the uniform-convexity constant gamma of the fidelity;
their product tau_n * sigma_n stays constant, so a valid initial pair
remains valid throughout.

Stopping is based on the relative primal change
||u_{n+1} - u_n|| / max(||u_n||, tiny), checked every iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import divergence, gradient, gradient_norm_sq_bound, norm2
from .prox import FidelityParams, dual_prox, penalty_value, prox_g

__all__ = [
    "SolverConfig",
    "SolveResult",
    "stopping_residual",
    "primal_energy",
    "accelerated_step_schedule",
    "solve_standard",
    "solve_accelerated",
    "solve",
    "DIAGNOSTICS_HEADER",
]

DIAGNOSTICS_HEADER = "iter,residual,energy"

_RESIDUAL_FLOOR = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class SolverConfig:
    """Step sizes, stopping rule and variant selection for one solve.

    tau0/sigma0 must satisfy tau0 * sigma0 * (8/h^2) < 1 for the standard
    variant (non-strict for the accelerated one); this is checked against
    the grid spacing when a solve starts. gamma > 0 is required by the
    accelerated variant.
    """

    tau0: float = 0.25
    sigma0: float = 0.25
    theta: float = 1.0
    gamma: float = 0.0
    max_iters: int = 20000
    stop_tol: float = 1e-4
    accelerated: bool = True

    def __post_init__(self):
        if self.tau0 <= 0 or self.sigma0 <= 0:
            raise ValueError("tau0 and sigma0 must be positive")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.accelerated and self.gamma <= 0:
            raise ValueError("accelerated variant requires gamma > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.stop_tol <= 0:
            raise ValueError("stop_tol must be positive")

    def validate_steps(self, h: float = 1.0) -> None:
        """Check the step-size product against the gradient norm bound."""
        product = self.tau0 * self.sigma0 * gradient_norm_sq_bound(h)
        if self.accelerated:
            if product > 1.0:
                raise ValueError(
                    f"tau0*sigma0*8/h^2 = {product:g} exceeds 1 (accelerated variant)"
                )
        elif product >= 1.0:
            raise ValueError(
                f"tau0*sigma0*8/h^2 = {product:g} must be strictly below 1"
            )


@dataclass
class SolveResult:
    """Primal/dual solution with iteration diagnostics."""

    u: np.ndarray
    p: np.ndarray
    iterations: int
    residual_history: np.ndarray
    converged: bool

    @property
    def residual(self) -> float:
        return float(self.residual_history[-1]) if self.iterations else float("nan")


def stopping_residual(u_prev: np.ndarray, u_curr: np.ndarray) -> float:
    """Relative primal change ||u_curr - u_prev|| / max(||u_prev||, tiny)."""
    if u_prev.shape != u_curr.shape:
        raise ValueError("iterates must share a shape")
    return norm2(u_curr - u_prev) / max(norm2(u_prev), _RESIDUAL_FLOOR)


def primal_energy(u: np.ndarray, fid: FidelityParams, reg, h: float = 1.0) -> float:
    """Discrete energy: regularizer of |grad u| plus quadratic fidelity."""
    p = gradient(u, h)
    mag = np.sqrt(p[0] * p[0] + p[1] * p[1])
    diff = u - fid.g
    return penalty_value(reg, mag) + float(np.sum(diff * diff)) / (2.0 * fid.lam)


def accelerated_step_schedule(tau0: float, sigma0: float, gamma: float):
    """Generator of (tau_n, sigma_n, theta_n) for the accelerated variant.

    theta_n = 1/sqrt(1 + 2*gamma*tau_n), tau_{n+1} = theta_n * tau_n,
    sigma_{n+1} = sigma_n / theta_n. The product tau_n * sigma_n is
    invariant because theta cancels.
    """
    tau, sigma = tau0, sigma0
    while True:
        theta = 1.0 / math.sqrt(1.0 + 2.0 * gamma * tau)
        yield tau, sigma, theta
        tau, sigma = theta * tau, sigma / theta


def _write_diag(stream, it: int, res: float, energy: float) -> None:
    stream.write(f"{it},{res:.17g},{energy:.17g}\n")


def _iterate(fid, reg, cfg, h, diagnostics, steps, u0=None):
    g = fid.g
    if u0 is not None and u0.shape != g.shape:
        raise ValueError("initial iterate must match the datum shape")
    u = g.copy() if u0 is None else np.asarray(u0, dtype=np.float64).copy()
    p = np.zeros((2,) + g.shape, dtype=np.float64)
    u_bar = u.copy()
    residuals = []
    converged = False
    iterations = 0
    norm_u = norm2(u)  # carried across iterations to avoid recomputation

    if diagnostics is not None:
        diagnostics.write(DIAGNOSTICS_HEADER + "\n")

    for n in range(cfg.max_iters):
        tau, sigma, theta = next(steps)
        p = dual_prox(reg, p + sigma * gradient(u_bar, h), sigma)
        u_old = u
        u = prox_g(u + tau * divergence(p, h), fid, tau)
        u_bar = u + theta * (u - u_old)

        iterations = n + 1
        norm_prev, norm_u = norm_u, norm2(u)
        res = norm2(u - u_old) / max(norm_prev, _RESIDUAL_FLOOR)
        residuals.append(res)
        if diagnostics is not None:
            _write_diag(diagnostics, iterations, res, primal_energy(u, fid, reg, h))
        if res <= cfg.stop_tol:
            converged = True
            break

    return SolveResult(u, p, iterations, np.asarray(residuals), converged)


def solve_standard(fid: FidelityParams, reg, cfg: SolverConfig, h: float = 1.0,
                   diagnostics=None, u0=None) -> SolveResult:
    """Run the fixed-step primal-dual iteration with extrapolation theta.

    Starts from u = g (or u0 when given) and p = 0. Non-convergence within
    max_iters is reported through ``converged`` rather than raised.
    ``diagnostics``, if given, receives per-iteration CSV rows
    ``iter,residual,energy``.
    """
    if cfg.accelerated:
        raise ValueError("config selects the accelerated variant; use solve_accelerated")
    cfg.validate_steps(h)

    def steps():
        while True:
            yield cfg.tau0, cfg.sigma0, cfg.theta

    return _iterate(fid, reg, cfg, h, diagnostics, steps(), u0)


def solve_accelerated(fid: FidelityParams, reg, cfg: SolverConfig, h: float = 1.0,
                      diagnostics=None, u0=None) -> SolveResult:
    """Run the accelerated variant with the per-iteration step schedule."""
    if not cfg.accelerated:
        raise ValueError("config selects the standard variant; use solve_standard")
    cfg.validate_steps(h)
    steps = accelerated_step_schedule(cfg.tau0, cfg.sigma0, cfg.gamma)
    return _iterate(fid, reg, cfg, h, diagnostics, steps, u0)


def solve(fid: FidelityParams, reg, cfg: SolverConfig, h: float = 1.0,
          diagnostics=None, u0=None) -> SolveResult:
    """Dispatch to the standard or accelerated variant per the config."""
    if cfg.accelerated:
        return solve_accelerated(fid, reg, cfg, h, diagnostics, u0)
    return solve_standard(fid, reg, cfg, h, diagnostics, u0)

"""Triweight kernel machinery.

Provides the smoothed error density built from a step distribution, the
Nadaraya-Watson plug-in estimate of the error distribution, and the
derivative of that estimate with respect to the regression parameter.
All smoothing uses the triweight kernel (35/32)(1 - u^2)^3 on [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._fast import banded_kernel_sums
from .errors import ExcludedError
from .isotonic import StepDistribution
from .model import Sample


def kernel(u):
    """Triweight kernel (35/32)(1 - u^2)^3 on [-1, 1], zero outside."""
    u = np.asarray(u, dtype=np.float64)
    t2 = 1.0 - u * u
    out = np.where(t2 > 0.0, 1.09375 * np.clip(t2, 0.0, None) ** 3, 0.0)
    return float(out) if out.ndim == 0 else out


def kernel_deriv(u):
    """Derivative -(105/16) u (1 - u^2)^2 on [-1, 1], zero outside."""
    u = np.asarray(u, dtype=np.float64)
    t2 = np.clip(1.0 - u * u, 0.0, None)
    out = np.where(np.abs(u) < 1.0, -6.5625 * u * t2 * t2, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelConfig:
    """Smoothing bandwidth h > 0 for the scaled kernel K(./h)/h."""

    h: float

    def __post_init__(self) -> None:
        if not self.h > 0.0:
            raise ValueError("bandwidth h must be positive")


def bandwidth(n: int, c: float, rate: int) -> float:
    """Bandwidth c * n**(-1/rate); rate 7 for scores, 5 for plug-in, 3 for intercept."""
    if n < 1 or c <= 0.0 or rate < 1:
        raise ValueError("bandwidth requires n >= 1, c > 0, rate >= 1")
    return c * float(n) ** (-1.0 / rate)


def _sorted_residuals(sample: Sample, beta):
    beta = np.atleast_1d(np.asarray(beta, dtype=np.float64))
    if beta.shape[0] != sample.k:
        raise ValueError(f"beta has length {beta.shape[0]}, sample has k={sample.k}")
    u = sample.t - sample.x @ beta
    order = np.argsort(u, kind="stable")
    return u[order], sample.delta[order].astype(np.float64), sample.x[order], order


def smoothed_density(dist: StepDistribution, cfg: KernelConfig, u):
    """Kernel-smoothed density of a step distribution: sum of mass * K_h(u - knot)."""
    knots, masses = dist.jumps()
    u_arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if knots.size == 0:
        out = np.zeros(u_arr.shape)
    else:
        out = banded_kernel_sums(knots, masses, u_arr, cfg.h)[:, 0] / cfg.h
    return float(out[0]) if np.ndim(u) == 0 else out


def plugin_F_grid(sample: Sample, beta, cfg: KernelConfig, v) -> np.ndarray:
    """Kernel-ratio estimate of the error distribution on a grid of points.

    Returns clamped ratio values with NaN at points where no observation
    lies within one bandwidth (zero denominator).
    """
    u, d, _, _ = _sorted_residuals(sample, beta)
    v_arr = np.atleast_1d(np.asarray(v, dtype=np.float64))
    w = np.column_stack([np.ones(u.shape[0]), d])
    sums = banded_kernel_sums(u, w, v_arr, cfg.h)
    g = sums[:, 0]
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.where(g > 0.0, np.clip(sums[:, 1] / g, 0.0, 1.0), np.nan)
    return vals


def plugin_F(sample: Sample, beta, cfg: KernelConfig, v: float) -> float:
    """Kernel-ratio estimate at a single point; raises ExcludedError off-support."""
    out = plugin_F_grid(sample, beta, cfg, float(v))[0]
    if np.isnan(out):
        raise ExcludedError(f"no observations within h={cfg.h!r} of v={v!r}")
    return float(out)


def plugin_dF_dbeta(sample: Sample, beta, cfg: KernelConfig, at: tuple) -> np.ndarray:
    """Derivative in beta of the kernel-ratio estimate along v = t - beta'x.

    at = (t, x) fixes the evaluation observation; the result has one
    component per covariate.  Raises ExcludedError when the denominator
    vanishes at v.
    """
    t0, x0 = at
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    beta = np.atleast_1d(np.asarray(beta, dtype=np.float64))
    if x0.shape[0] != sample.k or beta.shape[0] != sample.k:
        raise ValueError("at and beta must match the sample covariate dimension")
    h = cfg.h
    v = float(t0) - float(x0 @ beta)
    u = sample.t - sample.x @ beta
    near = np.abs(v - u) < h
    if not near.any():
        raise ExcludedError(f"no observations within h={h!r} of v={v!r}")
    z = (v - u[near]) / h
    kv = kernel(z)
    kd = kernel_deriv(z)
    g = float(kv.sum())
    if g <= 0.0:
        raise ExcludedError(f"zero kernel denominator at v={v!r}")
    d_near = sample.delta[near].astype(np.float64)
    f_val = float(np.clip(kv @ d_near / g, 0.0, 1.0))
    num = (sample.x[near] - x0).T @ ((d_near - f_val) * kd)
    return num / (h * g)


def plugin_terms(sample: Sample, beta, cfg: KernelConfig):
    """Plug-in estimate and its beta-derivative at every sample residual.

    Returns (f_vals, df_vals, delta_sorted, order) in sorted-residual
    order; df_vals has shape (n, k).  The diagonal kernel term keeps the
    denominator positive at sample points, so no point is excluded.
    """
    u, d, x, order = _sorted_residuals(sample, beta)
    n, k = x.shape
    h = cfg.h
    ones = np.ones(n)
    ratio = banded_kernel_sums(u, np.column_stack([ones, d]), u, h)
    g = ratio[:, 0]
    f_vals = np.clip(ratio[:, 1] / g, 0.0, 1.0)
    wcols = np.column_stack([ones, d, x, x * d[:, None]])
    dsums = banded_kernel_sums(u, wcols, u, h, deriv=True)
    s0 = dsums[:, 0]
    s1 = dsums[:, 1]
    sx = dsums[:, 2 : 2 + k]
    sxd = dsums[:, 2 + k :]
    num = sxd - f_vals[:, None] * sx - x * (s1 - f_vals * s0)[:, None]
    df_vals = num / (h * g)[:, None]
    return f_vals, df_vals, d, order

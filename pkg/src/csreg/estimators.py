"""Estimation pipelines for the regression parameter and the intercept.

Three score-based estimators and a profile-likelihood baseline produce
the slope; the intercept comes either from the mean of the fitted step
distribution or from the kernel-ratio distribution estimate.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import AllExcludedError, NoCrossingError
from .isotonic import StepDistribution, log_likelihood, mle_fixed_beta
from .kernels import KernelConfig, bandwidth, plugin_F_grid
from .model import Sample, TruncationSpec
from .scores import CrossingResult, find_root_brent, find_zero_crossing, psi1, psi2, psi3

DEFAULT_INTERVAL = (0.3, 0.7)
DEFAULT_EPS = 0.001


@dataclass(frozen=True)
class GridReport:
    """Profile-likelihood values over the search grid."""

    grid: np.ndarray
    values: np.ndarray
    best_index: int
    n_ties: int


@dataclass(frozen=True)
class EstimateResult:
    """Fitted slope, optional intercept, and solver diagnostics."""

    beta_hat: float
    method: str
    eps: float
    alpha_hat: Optional[float] = None
    h_beta: Optional[float] = None
    h_alpha: Optional[float] = None
    diagnostics: object = None


def _require_scalar_model(sample: Sample) -> None:
    if sample.k != 1:
        raise ValueError("estimation requires a single covariate column")


def estimate_score1(
    sample: Sample,
    interval: Tuple[float, float] = DEFAULT_INTERVAL,
    trunc: TruncationSpec = TruncationSpec(DEFAULT_EPS),
) -> EstimateResult:
    """Zero crossing of the unweighted score built on the shape-constrained fit."""
    _require_scalar_model(sample)

    def score(b: float) -> float:
        return float(psi1(sample, np.array([b]), trunc).value[0])

    crossing = find_zero_crossing(score, interval)
    return EstimateResult(
        beta_hat=crossing.beta_hat,
        method="score1",
        eps=trunc.eps,
        diagnostics=crossing,
    )


def estimate_score2(
    sample: Sample,
    interval: Tuple[float, float] = DEFAULT_INTERVAL,
    trunc: TruncationSpec = TruncationSpec(DEFAULT_EPS),
    c: float = 0.5,
) -> EstimateResult:
    """Zero crossing of the density-weighted score; h = c * n**(-1/7)."""
    _require_scalar_model(sample)
    cfg = KernelConfig(bandwidth(sample.n, c, 7))

    def score(b: float) -> float:
        return float(psi2(sample, np.array([b]), trunc, cfg).value[0])

    crossing = find_zero_crossing(score, interval)
    return EstimateResult(
        beta_hat=crossing.beta_hat,
        method="score2",
        eps=trunc.eps,
        h_beta=cfg.h,
        diagnostics=crossing,
    )


def estimate_plugin(
    sample: Sample,
    interval: Tuple[float, float] = DEFAULT_INTERVAL,
    trunc: TruncationSpec = TruncationSpec(DEFAULT_EPS),
    c: float = 0.5,
    prescan_points: int = 17,
) -> EstimateResult:
    """Brent root of the kernel-ratio score after a bracketing scan; h = c * n**(-1/5)."""
    _require_scalar_model(sample)
    cfg = KernelConfig(bandwidth(sample.n, c, 5))

    def score(b: float) -> float:
        return float(psi3(sample, np.array([b]), trunc, cfg).value[0])

    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    grid = np.linspace(lo, hi, prescan_points)
    vals = np.array([score(float(b)) for b in grid])
    signs = np.sign(vals)
    if np.all(signs == 0.0):
        raise NoCrossingError("score vanishes identically on the bracketing grid")
    zero_hits = np.flatnonzero(signs == 0.0)
    mid = 0.5 * (lo + hi)
    if zero_hits.size:
        i = int(min(zero_hits, key=lambda j: (abs(grid[j] - mid), j)))
        b = float(grid[i])
        crossing = CrossingResult(b, (b, b), prescan_points, 1, "brent")
    else:
        cells = [i for i in range(prescan_points - 1) if signs[i] != signs[i + 1]]
        if not cells:
            raise NoCrossingError("score keeps a constant sign on the interval")
        centers = [0.5 * (grid[i] + grid[i + 1]) for i in cells]
        pick = min(range(len(cells)), key=lambda j: (abs(centers[j] - mid), cells[j]))
        i = cells[pick]
        res = find_root_brent(score, (float(grid[i]), float(grid[i + 1])), tol=1e-6)
        crossing = dataclasses.replace(
            res, evaluations=res.evaluations + prescan_points, crossings=len(cells)
        )
    return EstimateResult(
        beta_hat=crossing.beta_hat,
        method="plugin",
        eps=trunc.eps,
        h_beta=cfg.h,
        diagnostics=crossing,
    )


def estimate_profile_mle(
    sample: Sample,
    interval: Tuple[float, float] = DEFAULT_INTERVAL,
    trunc: TruncationSpec = TruncationSpec(DEFAULT_EPS),
    grid_points: int = 100,
) -> EstimateResult:
    """Grid maximizer of the truncated profile log likelihood.

    The profile likelihood is piecewise constant in beta, so grid search
    is the optimizer; ties are broken toward the interval midpoint.
    """
    _require_scalar_model(sample)
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    if grid_points < 1:
        raise ValueError("grid_points must be at least 1")
    grid = np.linspace(lo, hi, grid_points) if grid_points > 1 else np.array([0.5 * (lo + hi)])
    values = np.array([log_likelihood(sample, np.array([b]), trunc=trunc) for b in grid])
    vmax = values.max()
    ties = np.flatnonzero(values == vmax)
    mid = 0.5 * (lo + hi)
    best = int(min(ties, key=lambda j: (abs(grid[j] - mid), j)))
    report = GridReport(grid=grid, values=values, best_index=best, n_ties=ties.size)
    return EstimateResult(
        beta_hat=float(grid[best]),
        method="profile",
        eps=trunc.eps,
        diagnostics=report,
    )


@dataclass(frozen=True)
class InterceptEstimate:
    """Mean of a step distribution with a flag when mass is missing."""

    value: float
    total_mass: float
    mass_deficit: bool


def intercept_from_mle(dist: StepDistribution) -> InterceptEstimate:
    """Mean of the fitted step distribution: sum of knot * jump mass.

    When the distribution tops out below one the partial-mass integral
    is returned with mass_deficit set; renormalizing would shift the
    estimate silently, so it is left to the caller.
    """
    knots, masses = dist.jumps()
    value = float(knots @ masses) if knots.size else 0.0
    total = dist.total_mass
    return InterceptEstimate(value=value, total_mass=total, mass_deficit=total < 1.0 - 1e-12)


def _fill_nearest(vals: np.ndarray) -> np.ndarray:
    """Replace NaNs by the value at the nearest defined index (ties go left)."""
    n = vals.size
    defined = np.flatnonzero(~np.isnan(vals))
    if defined.size == 0:
        raise AllExcludedError("distribution estimate undefined on the whole grid")
    idx = np.arange(n)
    pos = np.searchsorted(defined, idx)
    left = defined[np.clip(pos - 1, 0, defined.size - 1)]
    right = defined[np.clip(pos, 0, defined.size - 1)]
    nearest = np.where(np.abs(right - idx) < np.abs(idx - left), right, left)
    return vals[nearest]


def intercept_from_plugin(
    sample: Sample,
    beta_hat: float,
    trunc: TruncationSpec = TruncationSpec(DEFAULT_EPS),
    c_alpha: float = 0.75,
    grid_points: int = 1000,
) -> float:
    """Mean of the kernel-ratio distribution estimate via integration by parts.

    Integrates u_max - int F over the span of the fitted residuals with
    the trapezoid rule; grid points outside all kernel windows take the
    value of their nearest defined neighbor.
    """
    _require_scalar_model(sample)
    cfg = KernelConfig(bandwidth(sample.n, c_alpha, 3))
    beta = np.array([float(beta_hat)])
    u = sample.t - sample.x @ beta
    lo, hi = float(u.min()), float(u.max())
    grid = np.linspace(lo, hi, grid_points)
    f_vals = _fill_nearest(plugin_F_grid(sample, beta, cfg, grid))
    return hi - float(np.trapezoid(f_vals, grid))


def estimate(
    sample: Sample,
    method: str,
    interval: Tuple[float, float] = DEFAULT_INTERVAL,
    trunc: TruncationSpec = TruncationSpec(DEFAULT_EPS),
    c: float = 0.5,
    grid_points: int = 100,
) -> EstimateResult:
    """Dispatch to one of the slope estimators by method name."""
    if method == "score1":
        return estimate_score1(sample, interval, trunc)
    if method == "score2":
        return estimate_score2(sample, interval, trunc, c)
    if method == "plugin":
        return estimate_plugin(sample, interval, trunc, c)
    if method == "profile":
        return estimate_profile_mle(sample, interval, trunc, grid_points)
    raise ValueError(f"unknown method {method!r}")


def attach_intercept(
    sample: Sample,
    result: EstimateResult,
    c_alpha: float = 0.75,
) -> EstimateResult:
    """Pair the slope estimate with its intercept estimator.

    Score and profile slopes take the mean of the shape-constrained fit
    at beta_hat; the plug-in slope keeps the kernel-ratio pipeline with
    h = c_alpha * n**(-1/3).
    """
    beta = np.array([result.beta_hat])
    if result.method == "plugin":
        trunc = TruncationSpec(result.eps)
        alpha = intercept_from_plugin(sample, result.beta_hat, trunc, c_alpha)
        h_alpha = bandwidth(sample.n, c_alpha, 3)
        return dataclasses.replace(result, alpha_hat=alpha, h_alpha=h_alpha)
    est = intercept_from_mle(mle_fixed_beta(sample, beta))
    return dataclasses.replace(result, alpha_hat=est.value)

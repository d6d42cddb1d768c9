"""Estimating equations for the regression parameter.

Three score functions share the same skeleton: order residuals at the
trial parameter, estimate the error distribution, truncate to where the
estimate is away from 0 and 1, and average covariate-weighted residuals
of the indicator.  They differ in the distribution estimate (shape
constrained vs kernel ratio) and in the weight attached to each term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, NoCrossingError
from .isotonic import fit_with_values
from .kernels import KernelConfig, plugin_terms, smoothed_density
from .model import Sample, TruncationSpec, residual_order


@dataclass(frozen=True)
class ScoreValue:
    """Score vector together with how many terms entered the average."""

    value: np.ndarray
    n_used: int
    n_excluded: int


@dataclass(frozen=True)
class CrossingResult:
    """Located sign change of a score curve."""

    beta_hat: float
    bracket: Tuple[float, float]
    evaluations: int
    crossings: int
    method: str


def _trunc_mask(f_vals: np.ndarray, trunc: TruncationSpec, open_ends: bool) -> np.ndarray:
    eps = trunc.eps
    mask = (f_vals >= eps) & (f_vals <= 1.0 - eps)
    if open_ends:
        # variance weights divide by F(1-F); drop exact 0/1 even when eps == 0
        mask &= (f_vals > 0.0) & (f_vals < 1.0)
    return mask


def psi1(sample: Sample, beta, trunc: TruncationSpec) -> ScoreValue:
    """Average of x (delta - F) over the shape-constrained fit, truncated."""
    _, f_vals = fit_with_values(sample, beta)
    mask = _trunc_mask(f_vals, trunc, open_ends=False)
    n = sample.n
    resid = np.where(mask, sample.delta - f_vals, 0.0)
    value = sample.x.T @ resid / n
    n_used = int(mask.sum())
    return ScoreValue(value=value, n_used=n_used, n_excluded=n - n_used)


def psi2(sample: Sample, beta, trunc: TruncationSpec, cfg: KernelConfig) -> ScoreValue:
    """Variance-weighted score with a smoothed density factor.

    Each term is x f_h(u) (delta - F) / (F (1 - F)) where F is the
    shape-constrained fit and f_h smooths its jumps.
    """
    dist, f_vals = fit_with_values(sample, beta)
    mask = _trunc_mask(f_vals, trunc, open_ends=True)
    n = sample.n
    if not mask.any():
        return ScoreValue(value=np.zeros(sample.k), n_used=0, n_excluded=n)
    beta_arr = np.atleast_1d(np.asarray(beta, dtype=np.float64))
    u = sample.t - sample.x @ beta_arr
    dens = smoothed_density(dist, cfg, u[mask])
    fm = f_vals[mask]
    w = dens * (sample.delta[mask] - fm) / (fm * (1.0 - fm))
    value = sample.x[mask].T @ w / n
    n_used = int(mask.sum())
    return ScoreValue(value=value, n_used=n_used, n_excluded=n - n_used)


def psi3(sample: Sample, beta, trunc: TruncationSpec, cfg: KernelConfig) -> ScoreValue:
    """Variance-weighted score built entirely from the kernel-ratio estimate.

    Each term is dF/dbeta (delta - F) / (F (1 - F)) with both F and its
    derivative taken from the kernel ratio along v = t - beta'x.
    """
    f_vals, df_vals, d, _ = plugin_terms(sample, beta, cfg)
    mask = _trunc_mask(f_vals, trunc, open_ends=True)
    n = sample.n
    if not mask.any():
        return ScoreValue(value=np.zeros(sample.k), n_used=0, n_excluded=n)
    fm = f_vals[mask]
    w = (d[mask] - fm) / (fm * (1.0 - fm))
    value = df_vals[mask].T @ w / n
    n_used = int(mask.sum())
    return ScoreValue(value=value, n_used=n_used, n_excluded=n - n_used)


def find_zero_crossing(
    score: Callable[[float], float],
    interval: Tuple[float, float],
    grid_points: int = 100,
    refine_tol: float = 1e-6,
) -> CrossingResult:
    """Locate a sign change of a possibly discontinuous score on a grid.

    Scans grid_points equally spaced evaluations, keeps every cell whose
    endpoint signs differ, picks the cell nearest the interval midpoint,
    and bisects it down to refine_tol.  The estimate is the midpoint of
    the final bracket.  Raises NoCrossingError when no sign change
    exists on the grid.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    grid = np.linspace(lo, hi, grid_points)
    vals = np.empty(grid_points)
    evaluations = 0
    for i, b in enumerate(grid):
        vals[i] = score(float(b))
        evaluations += 1
    signs = np.sign(vals)
    if np.all(signs == 0.0):
        raise NoCrossingError("score vanishes identically on the grid")
    cells = []
    for i in range(grid_points - 1):
        s0, s1 = signs[i], signs[i + 1]
        if s0 == 0.0 and s1 == 0.0:
            continue
        if s0 * s1 <= 0.0:
            cells.append(i)
    if not cells:
        raise NoCrossingError("score keeps a constant sign on the interval")
    mid = 0.5 * (lo + hi)
    centers = [0.5 * (grid[i] + grid[i + 1]) for i in cells]
    pick = min(range(len(cells)), key=lambda j: (abs(centers[j] - mid), cells[j]))
    i = cells[pick]
    a, b = float(grid[i]), float(grid[i + 1])
    fa = vals[i]
    if signs[i] == 0.0:
        a = b = float(grid[i])
    elif signs[i + 1] == 0.0:
        a = b = float(grid[i + 1])
    else:
        while b - a > refine_tol:
            m = 0.5 * (a + b)
            fm = score(m)
            evaluations += 1
            if fm == 0.0:
                a = b = m
                break
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
    return CrossingResult(
        beta_hat=0.5 * (a + b),
        bracket=(a, b),
        evaluations=evaluations,
        crossings=len(cells),
        method="grid+bisect",
    )


def find_root_brent(
    score: Callable[[float], float],
    bracket: Tuple[float, float],
    tol: float = 1e-6,
) -> CrossingResult:
    """Brent root solve on a bracket with opposite-sign endpoints."""
    a, b = float(bracket[0]), float(bracket[1])
    if not a < b:
        raise ValueError("bracket must satisfy a < b")
    evaluations = 0

    def f(x: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return score(x)

    fa = f(a)
    if fa == 0.0:
        return CrossingResult(a, (a, a), evaluations, 1, "brent")
    fb = f(b)
    if fb == 0.0:
        return CrossingResult(b, (b, b), evaluations, 1, "brent")
    if np.sign(fa) == np.sign(fb):
        raise BracketError(f"score has the same sign at both ends of [{a}, {b}]")
    root = brentq(f, a, b, xtol=tol)
    return CrossingResult(float(root), (a, b), evaluations, 1, "brent")

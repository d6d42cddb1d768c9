"""Population-level quantities of the regression model via quadrature.

Fisher informations, the truncated efficient information, the simple
score's sandwich variance, the intercept variance bound, the population
score curve, and the identifiability integral.  All conditionals use
the closed form of the uniform design: given the residual, the
covariate is uniform on its feasible window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import SingularInformationError
from .model import (
    ModelSpec,
    Sample,
    _conditional_cdf_moments,
    _require_k1,
    conditional_x_moments,
    error_cdf,
    error_pdf,
    residual_density,
    residual_density_breakpoints,
    residual_support,
)
from .quadrature import adaptive_gauss_legendre, bisect_monotone

INFO_TOL = 1e-4
SCORE_TOL = 1e-6


@dataclass(frozen=True)
class PopulationReport:
    """Converged quadrature value for one population quantity."""

    quantity: str
    value: float
    eps: float
    quadrature_tol: float


def _error_region(model: ModelSpec, eps: float) -> Tuple[float, float]:
    """Interval where the error distribution lies within [eps, 1 - eps]."""
    e_lo, e_hi = model.error.support
    if eps <= 0.0:
        return float(e_lo), float(e_hi)
    if eps >= 0.5:
        raise ValueError("eps must be below 1/2")
    lo = bisect_monotone(lambda u: float(error_cdf(model, u)), eps, e_lo, e_hi)
    hi = bisect_monotone(lambda u: float(error_cdf(model, u)), 1.0 - eps, e_lo, e_hi)
    return lo, hi


def _information(model: ModelSpec, eps: float, use_variance: bool) -> float:
    _require_k1(model, "information")
    b0 = float(model.beta0[0])
    lo, hi = _error_region(model, eps)

    def integrand(u):
        u = np.asarray(u, dtype=np.float64)
        big_f = error_cdf(model, u)
        f0 = error_pdf(model, u)
        mean, var = conditional_x_moments(model, b0, u)
        weight = var if use_variance else var + mean * mean
        denom = big_f * (1.0 - big_f)
        dens = residual_density(model, b0, u)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(denom > 0.0, weight * f0 * f0 * dens / denom, 0.0)
        return out

    bps = residual_density_breakpoints(model, b0)
    return adaptive_gauss_legendre(integrand, lo, hi, tol=INFO_TOL, breakpoints=bps).value


def fisher_parametric(model: ModelSpec, eps: float = 0.0) -> PopulationReport:
    """Information for the slope when the error distribution is known.

    Integrates E(X^2|u) f0(u)^2 / (F0(1-F0)) against the residual
    density; eps > 0 restricts to where F0 is within [eps, 1 - eps].
    """
    value = _information(model, eps, use_variance=False)
    return PopulationReport("ip", value, eps, INFO_TOL)


def fisher_semiparametric(model: ModelSpec, eps: float = 0.0) -> PopulationReport:
    """Efficient information: same integral with Var(X|u) in place of E(X^2|u)."""
    value = _information(model, eps, use_variance=True)
    return PopulationReport("i", value, eps, INFO_TOL)


def score1_variance_components(model: ModelSpec, eps: float) -> Tuple[float, float]:
    """The derivative and variance factors of the unweighted score.

    A integrates f0(u) Var(X|u) and B integrates F0(1-F0) Var(X|u),
    both against the residual density over the truncation region.
    """
    _require_k1(model, "score variance")
    b0 = float(model.beta0[0])
    lo, hi = _error_region(model, eps)
    bps = residual_density_breakpoints(model, b0)

    def make(weighted_by_f0: bool):
        def integrand(u):
            u = np.asarray(u, dtype=np.float64)
            _, var = conditional_x_moments(model, b0, u)
            dens = residual_density(model, b0, u)
            if weighted_by_f0:
                w = error_pdf(model, u)
            else:
                big_f = error_cdf(model, u)
                w = big_f * (1.0 - big_f)
            return var * w * dens

        return integrand

    a_val = adaptive_gauss_legendre(make(True), lo, hi, tol=INFO_TOL, breakpoints=bps).value
    b_val = adaptive_gauss_legendre(make(False), lo, hi, tol=INFO_TOL, breakpoints=bps).value
    return a_val, b_val


def score1_asymptotic_variance(model: ModelSpec, eps: float) -> PopulationReport:
    """Sandwich variance A^-1 B A^-1 of the unweighted score estimator."""
    a_val, b_val = score1_variance_components(model, eps)
    if abs(a_val) < 1e-12:
        raise SingularInformationError("derivative factor A is numerically singular")
    return PopulationReport("score1var", b_val / (a_val * a_val), eps, INFO_TOL)


def intercept_variance(model: ModelSpec, eps: float, efficient: bool = True) -> PopulationReport:
    """Asymptotic variance of the intercept estimator.

    Sum of the slope-variance contribution a' V a, with V the efficient
    bound or the sandwich variance, and the distribution-estimation term
    integral of F0(1-F0) over the residual density.
    """
    _require_k1(model, "intercept variance")
    b0 = float(model.beta0[0])
    e_lo, e_hi = model.error.support
    bps = residual_density_breakpoints(model, b0)

    def a_integrand(u):
        u = np.asarray(u, dtype=np.float64)
        mean, _ = conditional_x_moments(model, b0, u)
        return mean * error_pdf(model, u)

    def second_integrand(u):
        u = np.asarray(u, dtype=np.float64)
        big_f = error_cdf(model, u)
        dens = residual_density(model, b0, u)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(dens > 0.0, big_f * (1.0 - big_f) / dens, 0.0)

    a_val = adaptive_gauss_legendre(a_integrand, e_lo, e_hi, tol=SCORE_TOL, breakpoints=bps).value
    second = adaptive_gauss_legendre(
        second_integrand, e_lo, e_hi, tol=SCORE_TOL, breakpoints=bps
    ).value
    if efficient:
        v = 1.0 / fisher_semiparametric(model, eps).value
    else:
        v = score1_asymptotic_variance(model, eps).value
    return PopulationReport("interceptvar", a_val * v * a_val + second, eps, SCORE_TOL)


def _transition_zone(model: ModelSpec, beta: float) -> Tuple[float, float]:
    """Interval outside which the limit distribution at beta is flat 0 or 1."""
    e_lo, e_hi = model.error.support
    d = float(beta) - float(model.beta0[0])
    x_lo, x_hi = model.x_ranges[0]
    corners = [e - d * x for e in (e_lo, e_hi) for x in (x_lo, x_hi)]
    return min(corners), max(corners)


def _cdf_moment_arrays(model: ModelSpec, beta: float, u_arr: np.ndarray):
    f_vals = np.empty(u_arr.size)
    m1_vals = np.empty(u_arr.size)
    for i, u in enumerate(u_arr.ravel()):
        f_vals[i], m1_vals[i] = _conditional_cdf_moments(model, beta, float(u))
    return f_vals, m1_vals


def _fbeta_region(
    model: ModelSpec, beta: float, eps: float, z_lo: float, z_hi: float, n_scan: int = 513
) -> Optional[Tuple[float, float]]:
    """Subinterval of [z_lo, z_hi] where the limit distribution is in [eps, 1-eps].

    Scan plus bisection on the scan cells that bracket the two levels;
    None when the region is empty.
    """
    if not z_hi > z_lo:
        return None
    if eps <= 0.0:
        return z_lo, z_hi
    grid = np.linspace(z_lo, z_hi, n_scan)
    fb, _ = _cdf_moment_arrays(model, beta, grid)

    def fb_at(u: float) -> float:
        return _conditional_cdf_moments(model, beta, u)[0]

    above = np.flatnonzero(fb >= eps)
    below = np.flatnonzero(fb <= 1.0 - eps)
    if above.size == 0 or below.size == 0:
        return None
    i = int(above[0])
    j = int(below[-1])
    lo = z_lo if i == 0 else bisect_monotone(fb_at, eps, float(grid[i - 1]), float(grid[i]))
    hi = (
        z_hi
        if j == n_scan - 1
        else bisect_monotone(fb_at, 1.0 - eps, float(grid[j]), float(grid[j + 1]))
    )
    if not hi > lo:
        return None
    return lo, hi


def _zone_within_support(model: ModelSpec, beta: float) -> Tuple[float, float]:
    z_lo, z_hi = _transition_zone(model, beta)
    u_lo, u_hi = residual_support(model, beta)
    span = u_hi - u_lo
    pad = 1e-9 * max(span, 1.0)
    return max(z_lo, u_lo + pad), min(z_hi, u_hi - pad)


def population_score1(model: ModelSpec, beta: float, eps: float) -> PopulationReport:
    """Population value of the unweighted score at a trial slope.

    Integrates Cov(indicator, X | residual) against the residual
    density over the region where the limit distribution is within
    [eps, 1 - eps]; zero exactly at the true slope.
    """
    _require_k1(model, "population score")
    beta = float(np.atleast_1d(beta)[0])
    z_lo, z_hi = _zone_within_support(model, beta)
    region = _fbeta_region(model, beta, eps, z_lo, z_hi)
    if region is None:
        return PopulationReport("popscore", 0.0, eps, SCORE_TOL)

    def integrand(u):
        u_arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
        fb, m1 = _cdf_moment_arrays(model, beta, u_arr)
        mean, _ = conditional_x_moments(model, beta, u_arr)
        dens = residual_density(model, beta, u_arr)
        return (m1 - mean * fb) * dens

    bps = residual_density_breakpoints(model, beta) + _transition_zone(model, beta)
    value = adaptive_gauss_legendre(
        integrand, region[0], region[1], tol=SCORE_TOL, breakpoints=bps
    ).value
    return PopulationReport("popscore", value, eps, SCORE_TOL)


def identifiability_integral(model: ModelSpec, beta: float, eps: float) -> PopulationReport:
    """Separation integral that is positive away from the true slope.

    Integrates f0(u) Cov((beta - beta0) X, F0(u + (beta - beta0) X) | u)
    / (F_beta(u)(1 - F_beta(u))) over the truncation region intersected
    with the error support.
    """
    _require_k1(model, "identifiability integral")
    beta = float(np.atleast_1d(beta)[0])
    d = beta - float(model.beta0[0])
    if d == 0.0:
        return PopulationReport("ident", 0.0, eps, SCORE_TOL)
    z_lo, z_hi = _zone_within_support(model, beta)
    region = _fbeta_region(model, beta, eps, z_lo, z_hi)
    if region is None:
        return PopulationReport("ident", 0.0, eps, SCORE_TOL)
    e_lo, e_hi = model.error.support
    lo = max(region[0], float(e_lo))
    hi = min(region[1], float(e_hi))
    if not hi > lo:
        return PopulationReport("ident", 0.0, eps, SCORE_TOL)

    def integrand(u):
        u_arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
        fb, m1 = _cdf_moment_arrays(model, beta, u_arr)
        mean, _ = conditional_x_moments(model, beta, u_arr)
        f0 = error_pdf(model, u_arr)
        cov = d * (m1 - mean * fb)
        denom = fb * (1.0 - fb)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(denom > 1e-14, f0 * cov / denom, 0.0)

    bps = residual_density_breakpoints(model, beta) + _transition_zone(model, beta)
    value = adaptive_gauss_legendre(integrand, lo, hi, tol=SCORE_TOL, breakpoints=bps).value
    return PopulationReport("ident", value, eps, SCORE_TOL)


@dataclass(frozen=True)
class InfluenceReport:
    """Efficient-score representation of a fitted slope's deviation."""

    representation: np.ndarray
    scaled_deviation: np.ndarray
    n_used: int
    info_inverse: float
    summands: np.ndarray


def influence_representation_check(
    model: ModelSpec, sample: Sample, beta_hat, eps: float
) -> InfluenceReport:
    """Efficient-score sum at the true parameter, scaled for comparison.

    Evaluates I_eps^-1 n^(-1/2) sum of (E(X|u) - x) f0(u)(delta - F0(u))
    / (F0(1-F0)) over the indices where F0(u) is within [eps, 1 - eps];
    the theory says this tracks sqrt(n)(beta_hat - beta0).
    """
    _require_k1(model, "influence representation")
    b0 = model.beta0
    u = sample.t - sample.x @ b0
    big_f = error_cdf(model, u)
    f0 = error_pdf(model, u)
    mask = (big_f >= eps) & (big_f <= 1.0 - eps)
    mean, _ = conditional_x_moments(model, float(b0[0]), u)
    denom = big_f * (1.0 - big_f)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where((f0 > 0.0) & (denom > 0.0), f0 * (sample.delta - big_f) / denom, 0.0)
    summands = (mean[:, None] - sample.x) * w[:, None]
    kept = summands[mask]
    inv = 1.0 / fisher_semiparametric(model, eps).value
    representation = inv * kept.sum(axis=0) / np.sqrt(sample.n)
    beta_arr = np.atleast_1d(np.asarray(beta_hat, dtype=np.float64))
    scaled_deviation = np.sqrt(sample.n) * (beta_arr - b0)
    return InfluenceReport(
        representation=representation,
        scaled_deviation=scaled_deviation,
        n_used=int(mask.sum()),
        info_inverse=inv,
        summands=kept,
    )

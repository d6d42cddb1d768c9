"""Censored-sample data model and the bundled uniform simulation design.

The observation scheme: a latent response y = beta0'x + eps is never seen
directly; at an inspection time t one records only delta = 1{y <= t}.
The bundled design draws t and every covariate coordinate from
independent uniforms and gives the error a smooth quadratic density on a
short interval, so the conditional law of x given the residual t - b'x
is uniform on an explicit window and population quantities reduce to
one-dimensional integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterator

import numpy as np

from .quadrature import _rule


def _as_float_array(a, name: str, ndim: int) -> np.ndarray:
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite entries")
    return out


# ---------------------------------------------------------------------------
# error distributions


def _poly_cdf(lo: float, width: float, u):
    s = np.clip((np.asarray(u, dtype=np.float64) - lo) / width, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def _poly_pdf(lo: float, width: float, u):
    u = np.asarray(u, dtype=np.float64)
    s = (u - lo) / width
    sc = np.clip(s, 0.0, 1.0)
    dens = 6.0 * sc * (1.0 - sc) / width
    return np.where((s >= 0.0) & (s <= 1.0), dens, 0.0)


@dataclass(frozen=True, eq=False)
class ErrorLaw:
    """Absolutely continuous error distribution on a compact support.

    cdf and pdf must be vectorized over u.  The quantile function is
    generic bisection, exact to about 1e-12 on unit-scale supports.
    """

    cdf: Callable
    pdf: Callable
    support: tuple[float, float]
    name: str = "custom"

    def __post_init__(self) -> None:
        lo, hi = self.support
        if not hi > lo:
            raise ValueError("error support must have positive width")

    def ppf(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64)
        lo = np.full(q.shape, self.support[0])
        hi = np.full(q.shape, self.support[1])
        # 64 halvings push the bracket width far below 1e-12
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.cdf(mid)) < q
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


def quadratic_error_law(lo: float = 0.375, hi: float = 0.625) -> ErrorLaw:
    """Error law with density proportional to (u - lo)(hi - u) on [lo, hi].

    In normalized coordinates s = (u - lo)/(hi - lo) the density is
    6 s (1 - s) and the distribution function is s^2 (3 - 2 s); the mean
    sits at the midpoint.  The default support reproduces the density
    384 (u - 0.375)(0.625 - u) with mean 0.5.
    """
    width = float(hi) - float(lo)
    return ErrorLaw(
        cdf=partial(_poly_cdf, float(lo), width),
        pdf=partial(_poly_pdf, float(lo), width),
        support=(float(lo), float(hi)),
        name="quadratic",
    )


# ---------------------------------------------------------------------------
# sample containers


@dataclass(frozen=True)
class Observation:
    """One censored record: inspection time, covariates, status indicator."""

    t: float
    x: np.ndarray
    delta: int


@dataclass(frozen=True, eq=False)
class Sample:
    """Columnar store of n observations with shared covariate dimension k."""

    t: np.ndarray
    x: np.ndarray
    delta: np.ndarray

    def __post_init__(self) -> None:
        t = _as_float_array(self.t, "t", 1)
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] != t.shape[0]:
            raise ValueError("x must have shape (n, k) matching t")
        if not np.all(np.isfinite(x)):
            raise ValueError("x contains non-finite entries")
        delta = np.asarray(self.delta)
        if delta.shape != t.shape:
            raise ValueError("delta must have shape (n,) matching t")
        if not np.isin(delta, (0, 1)).all():
            raise ValueError("delta entries must be 0 or 1")
        if t.shape[0] == 0:
            raise ValueError("sample must contain at least one observation")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "delta", delta.astype(np.int8))

    @property
    def n(self) -> int:
        return self.t.shape[0]

    @property
    def k(self) -> int:
        return self.x.shape[1]

    @property
    def observations(self) -> list[Observation]:
        return [
            Observation(t=float(self.t[i]), x=self.x[i].copy(), delta=int(self.delta[i]))
            for i in range(self.n)
        ]

    @classmethod
    def from_observations(cls, obs: list[Observation]) -> "Sample":
        if not obs:
            raise ValueError("sample must contain at least one observation")
        return cls(
            t=np.array([o.t for o in obs], dtype=np.float64),
            x=np.vstack([np.atleast_1d(o.x) for o in obs]).astype(np.float64),
            delta=np.array([o.delta for o in obs]),
        )


@dataclass(frozen=True, eq=False)
class ResidualOrder:
    """Residuals u = t - b'x sorted ascending with carried indicators.

    Ties keep the original row order (stable sort), so downstream fits
    are deterministic.
    """

    u: np.ndarray
    delta: np.ndarray
    index: np.ndarray

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def entries(self) -> list[tuple[float, int, int]]:
        return [
            (float(self.u[i]), int(self.delta[i]), int(self.index[i]))
            for i in range(self.n)
        ]


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Population design: true coefficients, uniform ranges, error law."""

    beta0: np.ndarray
    t_range: tuple[float, float]
    x_ranges: tuple[tuple[float, float], ...]
    error: ErrorLaw

    def __post_init__(self) -> None:
        beta0 = _as_float_array(np.atleast_1d(self.beta0), "beta0", 1)
        object.__setattr__(self, "beta0", beta0)
        t_lo, t_hi = (float(v) for v in self.t_range)
        if not t_hi > t_lo:
            raise ValueError("t_range must have positive width")
        object.__setattr__(self, "t_range", (t_lo, t_hi))
        xr = tuple((float(a), float(b)) for a, b in self.x_ranges)
        if len(xr) != beta0.shape[0]:
            raise ValueError("x_ranges must list one (lo, hi) pair per coefficient")
        for a, b in xr:
            if b < a:
                raise ValueError("x range bounds must satisfy lo <= hi")
        object.__setattr__(self, "x_ranges", xr)

    @property
    def k(self) -> int:
        return self.beta0.shape[0]


def simulation_model(beta0=0.5) -> ModelSpec:
    """The bundled design: T, X uniform on [0, 2], quadratic error on [0.375, 0.625]."""
    b = np.atleast_1d(np.asarray(beta0, dtype=np.float64))
    return ModelSpec(
        beta0=b,
        t_range=(0.0, 2.0),
        x_ranges=((0.0, 2.0),) * b.shape[0],
        error=quadratic_error_law(),
    )


@dataclass(frozen=True)
class TruncationSpec:
    """Truncation level for score denominators: keep points with F in [eps, 1-eps].

    eps = 0 is accepted (no truncation of the index set) although the
    estimation defaults always use a strictly positive level.
    """

    eps: float = 0.001

    def __post_init__(self) -> None:
        if not 0.0 <= self.eps < 0.5:
            raise ValueError("eps must lie in [0, 0.5)")


# ---------------------------------------------------------------------------
# core operations


def residual_order(sample: Sample, beta) -> ResidualOrder:
    """Sort residuals u_i = t_i - beta'x_i ascending, stable on ties."""
    beta = np.atleast_1d(np.asarray(beta, dtype=np.float64))
    if beta.shape[0] != sample.k:
        raise ValueError(f"beta has length {beta.shape[0]}, sample has k={sample.k}")
    u = sample.t - sample.x @ beta
    order = np.argsort(u, kind="stable")
    return ResidualOrder(u=u[order], delta=sample.delta[order], index=order)


def _uniform_matrix(seed: int, n: int, cols: int) -> np.ndarray:
    # One 256-bit counter block (four 64-bit words) per observation, so
    # row i is a pure function of (seed, i) and any prefix of the sample
    # is reproducible independently of how the rest is generated.
    blocks = (cols + 3) // 4
    raw = np.random.Philox(key=seed).random_raw(n * blocks * 4)
    raw = raw.reshape(n, blocks * 4)[:, :cols]
    return (raw >> np.uint64(11)) * 2.0 ** -53


def simulate(model: ModelSpec, n: int, seed: int, return_errors: bool = False):
    """Draw n observations from the model; identical seeds give identical samples."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    k = model.k
    raw = _uniform_matrix(int(seed), int(n), k + 2)
    t_lo, t_hi = model.t_range
    t = t_lo + (t_hi - t_lo) * raw[:, 0]
    x = np.empty((n, k))
    for j, (x_lo, x_hi) in enumerate(model.x_ranges):
        x[:, j] = x_lo + (x_hi - x_lo) * raw[:, 1 + j]
    eps = model.error.ppf(raw[:, k + 1])
    delta = (x @ model.beta0 + eps <= t).astype(np.int8)
    sample = Sample(t=t, x=x, delta=delta)
    if return_errors:
        return sample, eps
    return sample


def error_cdf(model: ModelSpec, u):
    """Distribution function of the error at u (vectorized)."""
    out = np.asarray(model.error.cdf(u), dtype=np.float64)
    return float(out) if out.ndim == 0 else out


def error_pdf(model: ModelSpec, u):
    """Density of the error at u (vectorized)."""
    out = np.asarray(model.error.pdf(u), dtype=np.float64)
    return float(out) if out.ndim == 0 else out


def _require_k1(model: ModelSpec, what: str) -> None:
    if model.k != 1:
        raise ValueError(f"{what} is available only for a single covariate (k=1)")


def covariate_window(model: ModelSpec, beta: float, u):
    """Feasible covariate interval given residual t - beta*x = u.

    Returns (lo, hi) arrays; an empty window has hi <= lo.  Constant
    covariates (degenerate range) return their point value twice.
    """
    _require_k1(model, "covariate_window")
    b = float(np.atleast_1d(beta)[0])
    u = np.asarray(u, dtype=np.float64)
    t_lo, t_hi = model.t_range
    x_lo, x_hi = model.x_ranges[0]
    if x_hi == x_lo:
        c = np.full(u.shape, x_lo)
        return c, c.copy()
    if b == 0.0:
        inside = (u >= t_lo) & (u <= t_hi)
        lo = np.where(inside, x_lo, 0.0)
        hi = np.where(inside, x_hi, 0.0)
        return lo, hi
    if b > 0.0:
        lo = np.maximum(x_lo, (t_lo - u) / b)
        hi = np.minimum(x_hi, (t_hi - u) / b)
    else:
        lo = np.maximum(x_lo, (t_hi - u) / b)
        hi = np.minimum(x_hi, (t_lo - u) / b)
    return lo, hi


def residual_density(model: ModelSpec, beta: float, u):
    """Density of t - beta*x under the model, by closed form for uniforms."""
    _require_k1(model, "residual_density")
    b = float(np.atleast_1d(beta)[0])
    u_arr = np.asarray(u, dtype=np.float64)
    t_lo, t_hi = model.t_range
    x_lo, x_hi = model.x_ranges[0]
    if x_hi == x_lo:
        # constant covariate: the residual is a shifted uniform in t
        shifted = u_arr + b * x_lo
        dens = np.where((shifted >= t_lo) & (shifted <= t_hi), 1.0 / (t_hi - t_lo), 0.0)
    else:
        lo, hi = covariate_window(model, b, u_arr)
        dens = np.clip(hi - lo, 0.0, None) / ((t_hi - t_lo) * (x_hi - x_lo))
    return float(dens) if dens.ndim == 0 else dens


def residual_support(model: ModelSpec, beta: float) -> tuple[float, float]:
    """Interval on which the residual density is positive."""
    _require_k1(model, "residual_support")
    b = float(np.atleast_1d(beta)[0])
    t_lo, t_hi = model.t_range
    x_lo, x_hi = model.x_ranges[0]
    ends = (t_lo - b * x_lo, t_lo - b * x_hi, t_hi - b * x_lo, t_hi - b * x_hi)
    return min(ends), max(ends)


def residual_density_breakpoints(model: ModelSpec, beta: float) -> tuple[float, ...]:
    """Residual values where the density's piecewise form changes slope."""
    _require_k1(model, "residual_density_breakpoints")
    b = float(np.atleast_1d(beta)[0])
    t_lo, t_hi = model.t_range
    x_lo, x_hi = model.x_ranges[0]
    if b == 0.0 or x_hi == x_lo:
        return tuple(sorted({t_lo - b * x_lo, t_hi - b * x_lo}))
    pts = {t_lo - b * x_lo, t_lo - b * x_hi, t_hi - b * x_lo, t_hi - b * x_hi}
    return tuple(sorted(pts))


def conditional_x_moments(model: ModelSpec, beta: float, u):
    """Mean and variance of x given residual u (uniform window closed form)."""
    lo, hi = covariate_window(model, beta, u)
    width = np.clip(hi - lo, 0.0, None)
    mean = 0.5 * (lo + hi)
    var = width * width / 12.0
    return mean, var


def _conditional_cdf_moments(model: ModelSpec, beta: float, u: float) -> tuple[float, float]:
    """E[F0(u + d x) | u] and E[x F0(u + d x) | u] with d = beta - beta0.

    x is uniform on its feasible window; the inner integral splits at the
    points where u + d x meets the error support so each piece is a
    polynomial and the 8-node rule is exact.
    """
    _require_k1(model, "f_beta")
    b = float(np.atleast_1d(beta)[0])
    d = b - float(model.beta0[0])
    u = float(u)
    lo, hi = covariate_window(model, b, np.float64(u))
    lo = float(lo)
    hi = float(hi)
    x_lo, x_hi = model.x_ranges[0]
    if x_hi == x_lo:
        f = float(error_cdf(model, u + d * x_lo))
        return f, x_lo * f
    if not hi > lo:
        raise ValueError(f"residual density vanishes at u={u!r}")
    if d == 0.0:
        f = float(error_cdf(model, u))
        return f, 0.5 * (lo + hi) * f
    e_lo, e_hi = model.error.support
    cuts = {lo, hi}
    for e in (e_lo, e_hi):
        xstar = (e - u) / d
        if lo < xstar < hi:
            cuts.add(xstar)
    pts = sorted(cuts)
    nodes, wts = _rule(8)
    acc_f = 0.0
    acc_xf = 0.0
    for a, c in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (a + c)
        half = 0.5 * (c - a)
        xs = mid + half * nodes
        fv = np.asarray(model.error.cdf(u + d * xs), dtype=np.float64)
        acc_f += half * float(wts @ fv)
        acc_xf += half * float(wts @ (xs * fv))
    width = hi - lo
    return acc_f / width, acc_xf / width


def f_beta(model: ModelSpec, beta: float, u: float) -> float:
    """Limit distribution of the fixed-beta error-distribution fit at u.

    This is the conditional mixture E[F0(u + (beta - beta0) x) | u]; it
    collapses to the true error distribution at beta = beta0.
    """
    return _conditional_cdf_moments(model, beta, u)[0]

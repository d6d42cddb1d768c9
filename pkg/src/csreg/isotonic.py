"""Fixed-beta nonparametric MLE of the error distribution.

With beta held fixed, maximizing the censored-data likelihood over all
distribution functions is an isotonic regression of the status
indicators sorted by residual: the fitted values are the left slopes of
the greatest convex minorant of the cumulative-sum diagram.  Exactly
tied residuals are pooled into one block before the fit so the result
is a function of the distinct residual values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._fast import pava_sums
from .model import ResidualOrder, Sample, TruncationSpec, residual_order

_VALUE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StepDistribution:
    """Right-continuous step function: values[i] on [knots[i], knots[i+1]).

    Evaluates to 0 before the first knot and stays at the last value
    afterwards.  Values are nondecreasing within [0, 1].
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        knots = np.asarray(self.knots, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if knots.ndim != 1 or knots.shape != values.shape or knots.size == 0:
            raise ValueError("knots and values must be equal-length nonempty 1-d arrays")
        if knots.size > 1 and not np.all(np.diff(knots) > 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(values < -_VALUE_TOL) or np.any(values > 1.0 + _VALUE_TOL):
            raise ValueError("values must lie in [0, 1]")
        if values.size > 1 and np.any(np.diff(values) < -_VALUE_TOL):
            raise ValueError("values must be nondecreasing")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", np.clip(values, 0.0, 1.0))

    def evaluate(self, u):
        """Right-continuous evaluation; 0 before the first knot."""
        u_arr = np.asarray(u, dtype=np.float64)
        idx = np.searchsorted(self.knots, u_arr, side="right") - 1
        out = np.where(idx >= 0, self.values[np.clip(idx, 0, None)], 0.0)
        return float(out) if out.ndim == 0 else out

    @property
    def masses(self) -> np.ndarray:
        """Jump sizes at each knot (first knot jumps from 0)."""
        return np.diff(self.values, prepend=0.0)

    @property
    def total_mass(self) -> float:
        return float(self.values[-1])

    def jumps(self) -> tuple[np.ndarray, np.ndarray]:
        """Knots carrying strictly positive mass, with their masses."""
        m = self.masses
        keep = m > 0.0
        return self.knots[keep], m[keep]


def cusum_diagram(order: ResidualOrder) -> np.ndarray:
    """Points (i, sum of the first i sorted indicators), i = 0..n."""
    if order.n == 0:
        raise ValueError("order must be nonempty")
    pts = np.empty((order.n + 1, 2))
    pts[:, 0] = np.arange(order.n + 1)
    pts[0, 1] = 0.0
    np.cumsum(order.delta, out=pts[1:, 1])
    return pts


def _fit_blocks(order: ResidualOrder) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct knots, fitted value per knot, and knot id per sorted row."""
    u = order.u
    first = np.empty(u.shape[0], dtype=bool)
    first[0] = True
    if u.shape[0] > 1:
        first[1:] = u[1:] > u[:-1]
    block = np.cumsum(first) - 1
    sums = np.bincount(block, weights=order.delta)
    counts = np.bincount(block).astype(np.float64)
    fitted = pava_sums(sums, counts)
    return u[first], fitted, block


def mle_fixed_beta(sample: Sample, beta) -> StepDistribution:
    """Error-distribution MLE with the regression parameter fixed at beta."""
    knots, fitted, _ = _fit_blocks(residual_order(sample, beta))
    return StepDistribution(knots=knots, values=fitted)


def fit_with_values(sample: Sample, beta) -> tuple[StepDistribution, np.ndarray]:
    """MLE plus its fitted values per observation in original row order."""
    order = residual_order(sample, beta)
    knots, fitted, block = _fit_blocks(order)
    per_point = np.empty(order.n)
    per_point[order.index] = fitted[block]
    return StepDistribution(knots=knots, values=fitted), per_point


def log_likelihood(
    sample: Sample,
    beta,
    dist: StepDistribution | None = None,
    trunc: TruncationSpec | None = None,
) -> float:
    """Censored-data log likelihood at (beta, dist); dist defaults to the MLE.

    With trunc given, only points whose fitted probability lies in
    [eps, 1 - eps] contribute.  Terms with F = 0, delta = 0 or F = 1,
    delta = 1 contribute zero; a genuinely impossible observation
    (delta = 1 at F = 0 or delta = 0 at F = 1) yields -inf.
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=np.float64))
    if dist is None:
        _, f_vals = fit_with_values(sample, beta)
    else:
        u = sample.t - sample.x @ beta
        f_vals = np.asarray(dist.evaluate(u), dtype=np.float64)
    if trunc is not None:
        keep = (f_vals >= trunc.eps) & (f_vals <= 1.0 - trunc.eps)
    else:
        keep = np.ones(f_vals.shape, dtype=bool)
    with np.errstate(divide="ignore"):
        terms = np.where(sample.delta == 1, np.log(f_vals), np.log1p(-f_vals))
    return float(np.sum(terms[keep])) if keep.any() else 0.0

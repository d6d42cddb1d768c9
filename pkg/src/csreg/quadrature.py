"""Gauss-Legendre quadrature with interval splitting and dyadic refinement."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=64)
def _rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def fixed_gauss_legendre(f: Callable, a: float, b: float, n: int = 64) -> float:
    """Integrate f over [a, b] with an n-node Gauss-Legendre rule.

    f must accept a node vector and return a same-length value vector.
    Degenerate intervals integrate to zero.
    """
    if not b > a:
        return 0.0
    nodes, weights = _rule(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = np.asarray(f(mid + half * nodes), dtype=np.float64)
    return half * float(weights @ vals)


def piecewise_gauss_legendre(f: Callable, points: Sequence[float], n: int = 64) -> float:
    """Sum of fixed rules over consecutive intervals of a sorted point list."""
    pts = np.asarray(points, dtype=np.float64)
    return float(sum(fixed_gauss_legendre(f, pts[i], pts[i + 1], n) for i in range(pts.size - 1)))


@dataclass(frozen=True)
class QuadratureResult:
    """Converged integral value with refinement diagnostics."""

    value: float
    error: float
    nodes: int


def adaptive_gauss_legendre(
    f: Callable,
    a: float,
    b: float,
    tol: float = 1e-8,
    breakpoints: Sequence[float] = (),
    levels: Sequence[int] = (64, 128, 256, 512, 1024),
) -> QuadratureResult:
    """Refine a piecewise Gauss-Legendre rule until two levels agree within tol.

    breakpoints inside (a, b) split the domain so each piece is smooth.
    Raises QuadratureError when the finest level still disagrees.
    """
    if not b > a:
        return QuadratureResult(value=0.0, error=0.0, nodes=int(levels[0]))
    inner = sorted(p for p in set(breakpoints) if a < p < b)
    pts = [a, *inner, b]
    prev = None
    gap = np.inf
    for n in levels:
        val = piecewise_gauss_legendre(f, pts, n)
        if prev is not None:
            gap = abs(val - prev)
            if gap <= tol:
                return QuadratureResult(value=val, error=gap, nodes=int(n))
        prev = val
    raise QuadratureError(
        f"refinement stalled at {levels[-1]} nodes with gap {gap:.3g} > tol {tol:g}"
    )


def bisect_monotone(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Solve f(u) = target for nondecreasing f on [lo, hi] by bisection."""
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo > 0.0 or fhi < 0.0:
        raise ValueError(f"target {target!r} not bracketed on [{lo!r}, {hi!r}]")
    a, b = float(lo), float(hi)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        if f(m) < target:
            a = m
        else:
            b = m
    return 0.5 * (a + b)

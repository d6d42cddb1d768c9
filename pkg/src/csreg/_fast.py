"""Hot inner loops: isotonic pooling and banded triweight kernel sums.

Both routines are compiled with numba when it is importable and fall back
to pure NumPy otherwise.  The loop sources double as the reference
implementations; tests compare the two paths directly.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

# triweight constants 35/32 and -105/16, both exact in binary
_KC = 1.09375
_KD = -6.5625


def _pava_loop(sums, weights):
    # Pool-adjacent-violators on blocks given by (sum, weight) pairs.
    # Means are compared by cross-multiplication, so integer-valued
    # inputs are pooled without rounding error.
    n = sums.shape[0]
    acc_s = np.empty(n)
    acc_w = np.empty(n)
    size = np.empty(n, np.int64)
    m = 0
    for i in range(n):
        cs = sums[i]
        cw = weights[i]
        cn = 1
        while m > 0 and acc_s[m - 1] * cw >= cs * acc_w[m - 1]:
            cs += acc_s[m - 1]
            cw += acc_w[m - 1]
            cn += size[m - 1]
            m -= 1
        acc_s[m] = cs
        acc_w[m] = cw
        size[m] = cn
        m += 1
    out = np.empty(n)
    pos = 0
    for b in range(m):
        val = acc_s[b] / acc_w[b]
        for _ in range(size[b]):
            out[pos] = val
            pos += 1
    return out


def _banded_sums_loop(points, weights, v, lo, hi, h, deriv):
    # out[i, c] = sum_j weights[j, c] * K((v[i] - points[j]) / h), with K
    # replaced by K' when deriv is set.  lo/hi bound the support window.
    nv = v.shape[0]
    m = weights.shape[1]
    out = np.zeros((nv, m))
    for i in range(nv):
        vi = v[i]
        for j in range(lo[i], hi[i]):
            z = (vi - points[j]) / h
            if z <= -1.0 or z >= 1.0:
                continue
            t2 = 1.0 - z * z
            if deriv:
                w = _KD * z * t2 * t2
            else:
                w = _KC * t2 * t2 * t2
            for c in range(m):
                out[i, c] += w * weights[j, c]
    return out


def _banded_sums_matrix(points, weights, v, h, deriv):
    z = (v[:, None] - points[None, :]) / h
    t2 = 1.0 - z * z
    t2[(z <= -1.0) | (z >= 1.0)] = 0.0
    if deriv:
        kern = _KD * z * t2 * t2
    else:
        kern = _KC * t2 * t2 * t2
    return kern @ weights


if HAVE_NUMBA:
    _pava_jit = njit(cache=True)(_pava_loop)
    _banded_jit = njit(cache=True)(_banded_sums_loop)


def pava_sums(sums: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Nondecreasing fit of block means sums[i]/weights[i].

    Returns the pooled mean for every input block.  All weights must be
    positive.
    """
    sums = np.ascontiguousarray(sums, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if sums.shape != weights.shape or sums.ndim != 1 or sums.size == 0:
        raise ValueError("sums and weights must be equal-length 1-d arrays")
    if HAVE_NUMBA:
        return _pava_jit(sums, weights)
    return _pava_loop(sums, weights)


def banded_kernel_sums(
    points: np.ndarray,
    weights: np.ndarray,
    v: np.ndarray,
    h: float,
    deriv: bool = False,
) -> np.ndarray:
    """Weighted triweight sums sum_j weights[j, c] * K((v_i - points[j]) / h).

    points must be sorted ascending; weights may be a vector or a matrix
    with one column per weighting.  With deriv=True the summand uses the
    kernel derivative K'.  Returns raw kernel values of shape
    (len(v), n_cols); callers apply the 1/h or 1/h^2 scale.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    v = np.ascontiguousarray(np.atleast_1d(v), dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if weights.ndim == 1:
        weights = weights[:, None]
    if weights.shape[0] != points.shape[0]:
        raise ValueError("weights rows must match points")
    if HAVE_NUMBA:
        lo = np.searchsorted(points, v - h, side="left")
        hi = np.searchsorted(points, v + h, side="right")
        return _banded_jit(points, weights, v, lo, hi, float(h), deriv)
    return _banded_sums_matrix(points, weights, v, float(h), deriv)

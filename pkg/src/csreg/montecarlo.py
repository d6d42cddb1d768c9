"""Monte Carlo replication harness and bootstrap bandwidth selection.

Replication j of a run draws its seed from (master_seed, j), so tables
are bit-identical for any worker count.  Failed replications are
excluded from the moments and counted.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import AllExcludedError, AllFailedError, BracketError, NoCrossingError
from .estimators import (
    DEFAULT_EPS,
    DEFAULT_INTERVAL,
    attach_intercept,
    estimate,
    estimate_plugin,
)
from .kernels import KernelConfig, bandwidth, plugin_F_grid
from .model import ModelSpec, Sample, TruncationSpec, simulate

METHODS = ("score1", "score2", "plugin", "profile")

# grid used in the bandwidth study: 0.01, then 0.05 step 0.05 up to 0.95
DEFAULT_C_GRID = tuple([0.01] + [round(0.05 * i, 2) for i in range(1, 20)])

_ESTIMATION_ERRORS = (NoCrossingError, BracketError, AllExcludedError)


@dataclass(frozen=True)
class MCConfig:
    """Replication settings for one Monte Carlo table."""

    n: int
    n_reps: int
    methods: frozenset = frozenset(METHODS)
    eps: float = DEFAULT_EPS
    c_beta: float = 0.5
    c_alpha: float = 0.75
    master_seed: int = 0
    parallelism: int = 1
    interval: Tuple[float, float] = DEFAULT_INTERVAL
    grid_points: int = 100

    def __post_init__(self) -> None:
        if self.n < 10:
            raise ValueError("n must be at least 10")
        if self.n_reps < 1:
            raise ValueError("n_reps must be at least 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        object.__setattr__(self, "methods", frozenset(self.methods))


@dataclass(frozen=True)
class MCRow:
    """Summary for one (parameter, method) pair."""

    parameter: str
    method: str
    n: int
    n_reps: int
    mean: float
    n_times_var: float
    failures: int


@dataclass(frozen=True)
class MCTable:
    """All (parameter, method) summaries of one run."""

    rows: List[MCRow] = field(default_factory=list)

    def row(self, parameter: str, method: str) -> MCRow:
        for r in self.rows:
            if r.parameter == parameter and r.method == method:
                return r
        raise KeyError(f"no row for ({parameter}, {method})")


def replication_seed(master_seed: int, j: int) -> int:
    """Independent 128-bit seed for replication j of a run."""
    state = np.random.SeedSequence((master_seed, j)).generate_state(4, np.uint32)
    return int.from_bytes(state.tobytes(), "little")


def _replicate(args) -> Dict[str, Tuple[Optional[float], Optional[float]]]:
    model, cfg, j = args
    sample = simulate(model, cfg.n, replication_seed(cfg.master_seed, j))
    trunc = TruncationSpec(cfg.eps)
    out: Dict[str, Tuple[Optional[float], Optional[float]]] = {}
    for method in sorted(cfg.methods):
        try:
            res = estimate(
                sample,
                method,
                cfg.interval,
                trunc,
                c=cfg.c_beta,
                grid_points=cfg.grid_points,
            )
        except _ESTIMATION_ERRORS:
            out[method] = (None, None)
            continue
        try:
            alpha = attach_intercept(sample, res, cfg.c_alpha).alpha_hat
        except _ESTIMATION_ERRORS:
            alpha = None
        out[method] = (res.beta_hat, alpha)
    return out


def _map_ordered(fn, tasks, parallelism: int, progress: Optional[Callable[[int], None]]):
    results = []
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for i, res in enumerate(pool.map(fn, tasks)):
                results.append(res)
                if progress is not None:
                    progress(i + 1)
    else:
        for i, task in enumerate(tasks):
            results.append(fn(task))
            if progress is not None:
                progress(i + 1)
    return results


def _summarize(parameter: str, method: str, n: int, n_reps: int, values: List[float]) -> MCRow:
    failures = n_reps - len(values)
    if not values:
        raise AllFailedError(f"every replication failed for {method} ({parameter})")
    arr = np.asarray(values)
    mean = float(arr.mean())
    var = float(arr.var(ddof=1)) if arr.size > 1 else 0.0
    return MCRow(
        parameter=parameter,
        method=method,
        n=n,
        n_reps=n_reps,
        mean=mean,
        n_times_var=n * var,
        failures=failures,
    )


def run_montecarlo(
    model: ModelSpec,
    cfg: MCConfig,
    progress: Optional[Callable[[int], None]] = None,
) -> MCTable:
    """Mean and n * variance of each estimator over cfg.n_reps replications."""
    tasks = [(model, cfg, j) for j in range(cfg.n_reps)]
    outcomes = _map_ordered(_replicate, tasks, cfg.parallelism, progress)
    rows: List[MCRow] = []
    for method in sorted(cfg.methods):
        betas = [o[method][0] for o in outcomes if o[method][0] is not None]
        alphas = [o[method][1] for o in outcomes if o[method][1] is not None]
        rows.append(_summarize("beta", method, cfg.n, cfg.n_reps, betas))
        rows.append(_summarize("alpha", method, cfg.n, cfg.n_reps, alphas))
    return MCTable(rows=rows)


@dataclass(frozen=True)
class BootstrapConfig:
    """Bandwidth-selection settings: candidate grid, pilot c0, resamples."""

    c_grid: Tuple[float, ...] = DEFAULT_C_GRID
    c0: float = 0.25
    B: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        grid = tuple(float(c) for c in self.c_grid)
        if not grid or any(c <= 0.0 for c in grid):
            raise ValueError("c_grid must be positive")
        if any(b >= a for b, a in zip(grid, grid[1:])):
            raise ValueError("c_grid must be strictly ascending")
        if self.c0 <= 0.0:
            raise ValueError("c0 must be positive")
        if self.B < 1:
            raise ValueError("B must be at least 1")
        object.__setattr__(self, "c_grid", grid)


class BootstrapResult(NamedTuple):
    c_opt: float
    mse_curve: np.ndarray


def _fit_grid(args) -> List[Optional[float]]:
    t, x, delta, c_grid, interval, eps = args
    sample = Sample(t=t, x=x, delta=delta)
    trunc = TruncationSpec(eps)
    out: List[Optional[float]] = []
    for c in c_grid:
        try:
            out.append(estimate_plugin(sample, interval, trunc, c=c).beta_hat)
        except _ESTIMATION_ERRORS:
            out.append(None)
    return out


def bootstrap_bandwidth(
    sample: Sample,
    bcfg: BootstrapConfig,
    trunc: TruncationSpec = TruncationSpec(DEFAULT_EPS),
    interval: Tuple[float, float] = DEFAULT_INTERVAL,
    parallelism: int = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> BootstrapResult:
    """Pick the bandwidth constant by resampling the indicator only.

    Fits the plug-in estimate at the pilot constant c0, draws B
    resamples with delta* ~ Bernoulli of the fitted distribution at the
    observed (t, x), re-estimates at every c on the grid, and returns
    the argmin of mean squared deviation from the pilot slope (ties to
    the smaller c).  The curve columns are (c, mse, failures).
    """
    base = estimate_plugin(sample, interval, trunc, c=bcfg.c0)
    cfg0 = KernelConfig(bandwidth(sample.n, bcfg.c0, 5))
    beta = np.array([base.beta_hat])
    u = sample.t - sample.x @ beta
    probs = plugin_F_grid(sample, beta, cfg0, u)
    # the diagonal kernel term keeps every residual inside a window
    probs = np.nan_to_num(probs, nan=0.5)
    gen = np.random.Generator(np.random.Philox(key=bcfg.seed))
    uniforms = gen.random((bcfg.B, sample.n))
    tasks = [
        (sample.t, sample.x, (uniforms[b] < probs).astype(np.int8), bcfg.c_grid, interval, trunc.eps)
        for b in range(bcfg.B)
    ]
    fits = _map_ordered(_fit_grid, tasks, parallelism, progress)
    m = len(bcfg.c_grid)
    curve = np.empty((m, 3))
    for ci, c in enumerate(bcfg.c_grid):
        devs = [
            (fits[b][ci] - base.beta_hat) ** 2 for b in range(bcfg.B) if fits[b][ci] is not None
        ]
        curve[ci, 0] = c
        curve[ci, 1] = float(np.mean(devs)) if devs else np.nan
        curve[ci, 2] = bcfg.B - len(devs)
    finite = np.isfinite(curve[:, 1])
    if not finite.any():
        raise AllFailedError("every bootstrap cell failed on the whole grid")
    masked = np.where(finite, curve[:, 1], np.inf)
    return BootstrapResult(c_opt=float(curve[np.argmin(masked), 0]), mse_curve=curve)


def _mc_cell(args) -> List[Optional[float]]:
    model, n, seed, c_grid, interval, eps = args
    sample = simulate(model, n, seed)
    return _fit_grid((sample.t, sample.x, sample.delta, c_grid, interval, eps))


def mc_mse_curve(
    model: ModelSpec,
    n: int,
    n_reps: int,
    c_grid: Sequence[float] = DEFAULT_C_GRID,
    trunc: TruncationSpec = TruncationSpec(DEFAULT_EPS),
    master_seed: int = 0,
    interval: Tuple[float, float] = DEFAULT_INTERVAL,
    parallelism: int = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> np.ndarray:
    """Monte Carlo mean squared error of the plug-in slope per bandwidth constant.

    Returns an array with columns (c, mse, failures) where the mse at c
    averages (beta_hat - beta0)^2 over the successful replications.
    """
    grid = tuple(float(c) for c in c_grid)
    beta0 = float(model.beta0[0])
    tasks = [
        (model, n, replication_seed(master_seed, j), grid, interval, trunc.eps)
        for j in range(n_reps)
    ]
    fits = _map_ordered(_mc_cell, tasks, parallelism, progress)
    curve = np.empty((len(grid), 3))
    for ci, c in enumerate(grid):
        devs = [(fits[j][ci] - beta0) ** 2 for j in range(n_reps) if fits[j][ci] is not None]
        curve[ci, 0] = c
        if not devs:
            raise AllFailedError(f"every replication failed at c={c}")
        curve[ci, 1] = float(np.mean(devs))
        curve[ci, 2] = n_reps - len(devs)
    return curve

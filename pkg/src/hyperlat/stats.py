"""Counting statistics, number-variance scans, and power-law exponent fits.

A scan draws M independent configurations, counts points in centered balls
over a log-spaced radius grid, and reports per-radius sample mean/variance
with bootstrap standard errors.  The growth exponent of the variance is
read off by unweighted OLS on the log-log points, matching the usual
straight-line fit on such plots.

Boundary policy: radii are capped at half the lattice halfwidth, so the
observation window sits well inside the simulated region (displacements
scale like N^h << N/2).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateEnsemble,
    InsufficientData,
    NonpositiveVariance,
    WindowTooSmall,
)
from .fgn import HurstIndex, _hval
from .pointproc import PALM, STATIONARIZED, PointConfiguration, depalmize, perturb_palm_lattice
from .streams import StreamKey

BOOTSTRAP_RESAMPLES = 200


def count_in_ball(config: PointConfiguration, r: float) -> int:
    """Number of points with |x| <= r, via binary search on the sorted set."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if r > config.extent / 2.0:
        raise WindowTooSmall(
            f"radius {r} exceeds half the configuration extent {config.extent}"
        )
    pts = config.points
    return int(np.searchsorted(pts, r, "right") - np.searchsorted(pts, -r, "left"))


def default_radii(n_sites: int, n_radii: int = 24, rmin: float = 16.0) -> np.ndarray:
    """Log-spaced radius grid in [rmin, n_sites/16], deduplicated after rounding.

    Small radii are excluded because lattice discreteness pollutes the power
    law; large ones by the boundary policy.
    """
    rmax = n_sites / 16.0
    if rmax <= rmin:
        raise ValueError("n_sites too small for the default radius grid")
    r = np.logspace(np.log10(rmin), np.log10(rmax), n_radii)
    return np.unique(np.round(r))


@dataclass(frozen=True)
class RadialVarianceTable:
    """Monte Carlo count statistics over a radius grid."""

    radii: np.ndarray
    mean_count: np.ndarray
    var_count: np.ndarray
    var_stderr: np.ndarray
    realizations: int
    params: dict
    counts: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be strictly ascending")


def _bootstrap_indices(M: int, key: StreamKey, resamples: int) -> np.ndarray:
    return key.generator().integers(0, M, size=(resamples, M))


def _count_rows(
    h: float, N: int, radii: np.ndarray, key: StreamKey, mode: str,
    lo: int, hi: int, out: np.ndarray,
) -> None:
    shift = N / 4.0
    for m in range(lo, hi):
        sub = key.child(1 + m)
        cfg = perturb_palm_lattice(h, N, sub.child(0))
        if mode == STATIONARIZED:
            cfg = depalmize(cfg, shift, sub.child(1))
        pts = cfg.points
        out[m] = np.searchsorted(pts, radii, "right") - np.searchsorted(pts, -radii, "left")


def number_variance_scan(
    h: float | HurstIndex,
    n_sites: int,
    radii,
    realizations: int,
    key: StreamKey,
    mode: str = STATIONARIZED,
    threads: int = 1,
    bootstrap: int = BOOTSTRAP_RESAMPLES,
    keep_counts: bool = False,
) -> RadialVarianceTable:
    """Monte Carlo Var[count in ball] over a radius grid.

    One fresh configuration per realization (realization m uses the child
    stream 1+m, pre-assigned by index, so results are identical for any
    thread count); radii share a realization and are therefore correlated
    across the grid.  Variance standard errors come from a nonparametric
    bootstrap over realizations.
    """
    hh = _hval(h)
    M = int(realizations)
    if M < 2:
        raise DegenerateEnsemble("need at least 2 realizations for a variance")
    radii = np.asarray(radii, dtype=np.float64)
    if radii.ndim != 1 or len(radii) == 0 or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be a nonempty ascending vector")
    N = int(n_sites) // 2
    if N < 2:
        raise ValueError("n_sites too small")
    if radii[-1] > N / 2.0:
        raise WindowTooSmall(
            f"max radius {radii[-1]} exceeds boundary-policy limit {N / 2.0}"
        )
    if mode not in (PALM, STATIONARIZED):
        raise ValueError(f"unknown scan mode {mode!r}")

    counts = np.empty((M, len(radii)))
    threads = max(1, int(threads))
    if threads == 1:
        _count_rows(hh, N, radii, key, mode, 0, M, counts)
    else:
        edges = np.linspace(0, M, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_count_rows, hh, N, radii, key, mode, lo, hi, counts)
                for lo, hi in zip(edges[:-1], edges[1:])
                if hi > lo
            ]
            for fut in futures:
                fut.result()

    var = counts.var(axis=0, ddof=1)
    idx = _bootstrap_indices(M, key.child(0), bootstrap)
    boot_var = counts[idx].var(axis=1, ddof=1)
    stderr = boot_var.std(axis=0, ddof=1)
    return RadialVarianceTable(
        radii=radii,
        mean_count=counts.mean(axis=0),
        var_count=var,
        var_stderr=stderr,
        realizations=M,
        params={
            "h": hh,
            "n_sites": int(n_sites),
            "halfwidth": N,
            "mode": mode,
            "master_seed": key.master_seed,
            "stream_index": key.stream_index,
        },
        counts=counts if keep_counts else None,
    )


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    residuals: np.ndarray = field(repr=False)
    n_points: int = 0

    def __post_init__(self):
        if not 0.0 <= self.r_squared <= 1.0 + 1e-12:
            raise ValueError("r_squared outside [0, 1]")


def _ols_loglog(logr: np.ndarray, logv: np.ndarray, w: np.ndarray | None = None) -> tuple:
    if w is None:
        w = np.ones_like(logr)
    A = np.vstack([logr, np.ones_like(logr)]).T * np.sqrt(w)[:, None]
    coef, *_ = np.linalg.lstsq(A, logv * np.sqrt(w), rcond=None)
    return float(coef[0]), float(coef[1])


def loglog_regress(table: RadialVarianceTable, weights=None) -> RegressionFit:
    """OLS of log(var_count) on log(r); the slope is the growth exponent.

    Unweighted by default; pass weights for the variance-weighted variant.
    """
    r, v = table.radii, table.var_count
    if len(r) < 3:
        raise InsufficientData("need at least 3 radii for a regression")
    if np.any(v <= 0):
        raise NonpositiveVariance("all variances must be positive for a log-log fit")
    logr, logv = np.log(r), np.log(v)
    slope, intercept = _ols_loglog(logr, logv, weights)
    fitted = slope * logr + intercept
    resid = logv - fitted
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((logv - logv.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return RegressionFit(
        slope=slope, intercept=intercept, r_squared=min(r2, 1.0),
        residuals=resid, n_points=len(r),
    )


@dataclass(frozen=True)
class SweepPoint:
    h: float
    slope: float
    slope_stderr: float
    fit: RegressionFit


def exponent_sweep(
    h_values,
    n_sites: int,
    radii,
    realizations: int,
    key: StreamKey,
    mode: str = STATIONARIZED,
    threads: int = 1,
    bootstrap: int = BOOTSTRAP_RESAMPLES,
) -> list[SweepPoint]:
    """Fitted variance-growth exponent per Hurst value, with bootstrap errors.

    The slope standard error reuses the scan's bootstrap resamples: each
    resample of realizations yields a variance curve and a refitted slope.
    """
    points = []
    radii = np.asarray(radii, dtype=np.float64)
    logr = np.log(radii)
    for i, h in enumerate(h_values):
        hh = _hval(h)
        sub = key.child(i)
        table = number_variance_scan(
            hh, n_sites, radii, realizations, sub, mode=mode,
            threads=threads, bootstrap=bootstrap, keep_counts=True,
        )
        fit = loglog_regress(table)
        idx = _bootstrap_indices(table.realizations, sub.child(0), bootstrap)
        boot_var = table.counts[idx].var(axis=1, ddof=1)
        slopes = np.array(
            [_ols_loglog(logr, np.log(bv))[0] for bv in boot_var if np.all(bv > 0)]
        )
        points.append(
            SweepPoint(h=hh, slope=fit.slope, slope_stderr=float(slopes.std(ddof=1)), fit=fit)
        )
    return points

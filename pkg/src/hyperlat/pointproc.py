"""Perturbed-lattice point configurations and their stationarized versions.

The basic object is the conditioned ("palm") configuration obtained by
displacing every site n of the integer window [-N, N] to n + B_n, where B
is an exact fBm path with B_0 = 0, so the origin is always a point.  An
approximate stationary version is produced by one large uniform shift; the
shift halfwidth is recorded because the approximation improves only as the
halfwidth grows.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import WindowTooSmall
from .fgn import HurstIndex, _hval, sample_fbm_lattice, sample_fbm_points
from .streams import StreamKey

PALM = "palm"
STATIONARIZED = "stationarized"


@dataclass(frozen=True)
class PointConfiguration:
    """Finite sorted point set with generation metadata.

    kind="palm" configurations contain the origin exactly; stationarized
    ones are palm configurations translated by one uniform draw.
    """

    points: np.ndarray = field(repr=False)
    kind: str
    meta: dict

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1:
            raise ValueError("points must be one-dimensional")
        if np.any(np.diff(pts) < 0):
            raise ValueError("points must be sorted ascending")
        if self.kind not in (PALM, STATIONARIZED):
            raise ValueError(f"unknown configuration kind {self.kind!r}")
        if self.kind == PALM and not np.any(pts == 0.0):
            raise ValueError("palm configurations must contain the origin")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def extent(self) -> float:
        return float(self.points[-1] - self.points[0])


def lattice_configuration(N: int) -> PointConfiguration:
    """Unperturbed palm lattice on [-N, N] (the zero-displacement case)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    pts = np.arange(-N, N + 1, dtype=np.float64)
    return PointConfiguration(points=pts, kind=PALM, meta={"source": "lattice", "halfwidth": N})


def poisson_configuration(
    halfwidth: float, key: StreamKey, intensity: float = 1.0
) -> PointConfiguration:
    """Homogeneous Poisson control sample on [-halfwidth, halfwidth]."""
    rng = key.generator()
    n = rng.poisson(intensity * 2.0 * halfwidth)
    pts = np.sort(rng.uniform(-halfwidth, halfwidth, size=n))
    return PointConfiguration(
        points=pts,
        kind=STATIONARIZED,
        meta={"source": "poisson", "halfwidth": halfwidth, "intensity": intensity, "key": key},
    )


def perturb_palm_lattice(
    h: float | HurstIndex,
    N: int,
    key: StreamKey,
    mode: str = "rebased",
) -> PointConfiguration:
    """Displace each site of [-N, N] by an exact fBm: {n + B_n}.

    The origin site is stored exactly (0 + 0.0); cardinality is 2N+1.
    """
    hh = _hval(h)
    path = sample_fbm_lattice(hh, N, key, mode=mode)
    pts = np.sort(path.sites.astype(np.float64) + path.values)
    return PointConfiguration(
        points=pts,
        kind=PALM,
        meta={"source": "fbm_lattice", "h": hh, "halfwidth": N, "key": key, "fbm_mode": mode},
    )


def perturb_point_set(
    base: PointConfiguration, h: float | HurstIndex, key: StreamKey
) -> PointConfiguration:
    """Displace each point x of a palm configuration to x + B_x.

    Integer point sets ride the O(n log n) lattice sampler; anything else
    uses the dense exact sampler (desk scale only).
    """
    hh = _hval(h)
    if base.kind != PALM:
        raise ValueError("base configuration must be palm (contain the origin)")
    pts = base.points
    if np.all(pts == np.round(pts)):
        idx = pts.astype(np.int64)
        N = max(int(np.abs(idx).max()), 1)
        path = sample_fbm_lattice(hh, N, key)
        b = path.values[idx + N]
    else:
        b = sample_fbm_points(hh, pts, key)
    out = pts + b
    out[pts == 0.0] = 0.0
    return PointConfiguration(
        points=np.sort(out),
        kind=PALM,
        meta={"source": "fbm_points", "h": hh, "base": base.meta.get("source"), "key": key},
    )


def depalmize(
    config: PointConfiguration, shift_halfwidth: float, key: StreamKey
) -> PointConfiguration:
    """Translate the whole configuration by one uniform draw on [-x, x].

    This approximates the stationary process only for large x; x is capped
    at a quarter of the extent so the central observation window stays
    covered, and is recorded in the metadata.
    """
    x = float(shift_halfwidth)
    if x <= 0:
        raise ValueError("shift halfwidth must be positive")
    if x > config.extent / 4.0:
        raise WindowTooSmall(
            f"shift halfwidth {x} exceeds a quarter of the extent {config.extent}"
        )
    shift = float(key.generator().uniform(-x, x))
    meta = dict(config.meta)
    meta.update({"shift_halfwidth": x, "shift": shift, "shift_key": key})
    return PointConfiguration(points=config.points + shift, kind=STATIONARIZED, meta=meta)


# --------------------------------------------------------------------------
# Campbell-formula statistical test
# --------------------------------------------------------------------------
#
# For an intensity-1 stationary process, E[f(palm)] equals
# E[sum over points t in [0,1) of f(config - t)].  Both sides are estimated
# on independent ensembles: palm configurations on the left, approximately
# stationarized ones on the right; the residual dePalmization bias is part
# of the quoted tolerance.


def _count_pm(points: np.ndarray, a: float) -> float:
    return float(
        np.searchsorted(points, a, "right") - np.searchsorted(points, -a, "left")
    )


def _no_point_in(points: np.ndarray, lo: float, hi: float) -> float:
    i = np.searchsorted(points, lo, "right")
    return 1.0 if i >= len(points) or points[i] >= hi else 0.0


TEST_FUNCTIONS = {
    "one": lambda pts: 1.0,
    "count_pm2": lambda pts: _count_pm(pts, 2.0),
    "empty_halfgap": lambda pts: _no_point_in(pts, 0.0, 0.5),
}


@dataclass(frozen=True)
class CampbellResult:
    lhs: float
    rhs: float
    z: float
    lhs_stderr: float
    rhs_stderr: float
    test_function: str


def campbell_check(
    h: float | HurstIndex,
    N: int,
    realizations: int,
    test_function: str,
    key: StreamKey,
    shift_halfwidth: float | None = None,
) -> CampbellResult:
    """Monte Carlo z-test of the palm/stationary consistency identity."""
    hh = _hval(h)
    if test_function not in TEST_FUNCTIONS:
        raise ValueError(
            f"unknown test function {test_function!r}; choose from {sorted(TEST_FUNCTIONS)}"
        )
    f = TEST_FUNCTIONS[test_function]
    x = N / 4.0 if shift_halfwidth is None else float(shift_halfwidth)
    M = int(realizations)
    if M < 2:
        raise ValueError("need at least two realizations")

    lhs_key, rhs_key = key.child(0), key.child(1)
    lhs_vals = np.empty(M)
    for m in range(M):
        cfg = perturb_palm_lattice(hh, N, lhs_key.child(m))
        lhs_vals[m] = f(cfg.points)

    rhs_vals = np.empty(M)
    for m in range(M):
        sub = rhs_key.child(m)
        cfg = depalmize(perturb_palm_lattice(hh, N, sub.child(0)), x, sub.child(1))
        pts = cfg.points
        lo = np.searchsorted(pts, 0.0, "left")
        hi = np.searchsorted(pts, 1.0, "left")
        rhs_vals[m] = sum(f(pts - t) for t in pts[lo:hi])

    lhs, rhs = float(lhs_vals.mean()), float(rhs_vals.mean())
    se_l = float(lhs_vals.std(ddof=1) / np.sqrt(M))
    se_r = float(rhs_vals.std(ddof=1) / np.sqrt(M))
    denom = np.hypot(se_l, se_r)
    z = 0.0 if denom == 0.0 else (lhs - rhs) / denom
    return CampbellResult(
        lhs=lhs, rhs=rhs, z=float(z), lhs_stderr=se_l, rhs_stderr=se_r,
        test_function=test_function,
    )


def translated(config: PointConfiguration, shift: float) -> PointConfiguration:
    """Pointwise translation, preserving kind and metadata (test helper)."""
    return replace(config, points=config.points + shift)

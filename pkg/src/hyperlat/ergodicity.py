"""Variogram, mixing criterion, and spectral-scaling checks for the fBm.

A Gaussian process with stationary increments is mixing exactly when the
cross-covariance Cov(B_{-a}, B_{t+b} - B_t) vanishes at infinity.  The
closed-form mixing kernel used here is the four-term variogram expression

    V_{a,b}(t) = v(t+a) + v(t+b) - v(t+a+b) - v(t),

which by the polarization identity equals exactly TWICE that covariance;
decay of one is decay of the other.  The criterion is checked three ways:
in closed form, by Monte Carlo on exact two-sided paths (which certifies
the cross-origin correlation of the re-based sampler at the same time),
and through the scale invariance of the spectral integral implied by the
power-law increment spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import QuadratureFailure
from .fgn import HurstIndex, _hval, fbm_point_covariance, sample_fbm_lattice_batch
from .streams import StreamKey


def variogram(h: float | HurstIndex, t) -> float | np.ndarray:
    """Var[B_t] = |t|^{2h}."""
    hh = _hval(h)
    t = np.asarray(t, dtype=np.float64)
    v = np.abs(t) ** (2 * hh)
    return v if v.ndim else float(v)


def mixing_covariance(h: float | HurstIndex, a: float, b: float, t) -> float | np.ndarray:
    """V_{a,b}(t) = v(t+a) + v(t+b) - v(t+a+b) - v(t), the mixing kernel.

    Symmetric in (a, b); identically zero when a or b is zero; zero for the
    Brownian case once all arguments are positive.  For t much larger than
    the lags the four-term difference is evaluated through expm1/log1p to
    dodge catastrophic cancellation (V decays like t^{2h-2} while each term
    grows like t^{2h}).
    """
    hh = _hval(h)
    t = np.asarray(t, dtype=np.float64)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if a == 0.0 or b == 0.0:  # terms cancel pairwise, exactly
        return 0.0 if scalar else np.zeros_like(t)
    out = np.empty_like(t)
    big = t > 8.0 * max(abs(a), abs(b), abs(a + b), 1.0)
    if np.any(big):
        tb = t[big]
        e = lambda c: np.expm1(2 * hh * np.log1p(c / tb))
        out[big] = tb ** (2 * hh) * (e(a) + e(b) - e(a + b))
    if np.any(~big):
        ts = t[~big]
        out[~big] = (
            variogram(hh, ts + a)
            + variogram(hh, ts + b)
            - variogram(hh, ts + a + b)
            - variogram(hh, ts)
        )
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class MixingCurve:
    h: HurstIndex
    a: float
    b: float
    t: np.ndarray
    values: np.ndarray = field(repr=False)


def mixing_decay_check(
    h: float | HurstIndex, a: float, b: float, t_grid,
    decay_ratio: float = 1e-3,
) -> tuple[MixingCurve, bool]:
    """Evaluate V_{a,b} on an increasing grid and decide whether it decays.

    Verdict: |V| is eventually decreasing (tested on the top half of the
    grid) and |V| at the last point is below decay_ratio times |V| at the
    first.  An identically-zero curve passes trivially.
    """
    hh = _hval(h)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t grid must be strictly increasing")
    vals = np.asarray(mixing_covariance(hh, a, b, t_grid))
    curve = MixingCurve(h=HurstIndex(hh), a=float(a), b=float(b), t=t_grid, values=vals)
    mag = np.abs(vals)
    if mag.max() == 0.0:
        return curve, True
    tail = mag[len(mag) // 2 :]
    eventually_decreasing = bool(np.all(np.diff(tail) <= 1e-15 * mag.max()))
    decayed = mag[-1] < decay_ratio * mag[0] if mag[0] > 0 else mag[-1] == 0.0
    return curve, eventually_decreasing and decayed


def mc_mixing_covariance(
    h: float | HurstIndex,
    a: float,
    b: float,
    t: float,
    realizations: int,
    key: StreamKey,
) -> tuple[float, float]:
    """Sample covariance of (B_{-a}, B_{t+b} - B_t) over exact two-sided paths.

    Integer (a, b, t) ride the re-based lattice sampler; other values use
    the dense exact sampler.  The population value is
    0.5 * mixing_covariance(h, a, b, t); agreement at that value certifies
    both the polarization identity and the cross-origin correlation of the
    sampler.
    """
    hh = _hval(h)
    M = int(realizations)
    if M < 2:
        raise ValueError("need at least two realizations")
    pts = [-float(a), float(t), float(t) + float(b)]
    if all(float(p).is_integer() for p in pts):
        N = max(1, int(max(abs(p) for p in pts)))
        paths = sample_fbm_lattice_batch(hh, N, key, M)
        idx = [N + int(p) for p in pts]
        left = paths[:, idx[0]]
        incr = paths[:, idx[2]] - paths[:, idx[1]]
    else:
        grid = np.unique(np.concatenate([pts, [0.0]]))
        vals = _dense_paths(hh, grid, key, M)
        pos = {p: i for i, p in enumerate(grid)}
        left = vals[:, pos[pts[0]]]
        incr = vals[:, pos[pts[2]]] - vals[:, pos[pts[1]]]
    prod = left * incr
    est = float(prod.mean())
    stderr = float(prod.std(ddof=1) / np.sqrt(M))
    return est, stderr


def _dense_paths(h: float, grid: np.ndarray, key: StreamKey, M: int) -> np.ndarray:
    from .fgn import _cholesky_psd  # local import to keep module load light

    nz = grid != 0.0
    chol = _cholesky_psd(fbm_point_covariance(h, grid[nz]))
    z = key.generator().standard_normal((M, int(nz.sum())))
    out = np.zeros((M, len(grid)))
    out[:, nz] = z @ chol.T
    return out


def levy_spectral_integral(h: float | HurstIndex, t: float, tol: float = 1e-11) -> float:
    """I(t) = integral over R of |1 - e^{itx}|^2 |x|^{-1-2h} dx.

    Split at |x| = 1: the inner part uses the cancellation-free form
    4 sin^2(tx/2); the outer part is 1/h minus a Fourier-cosine tail
    (QUADPACK qawf).  Exactly proportional to t^{2h}.
    """
    hh = _hval(h)
    t = float(t)
    if t <= 0:
        raise ValueError("t must be positive")
    inner, _ = integrate.quad(
        lambda x: 4.0 * np.sin(0.5 * t * x) ** 2 * x ** (-1.0 - 2 * hh),
        0.0, 1.0, epsabs=tol, epsrel=1e-12, limit=400,
    )
    osc, abserr, info, *rest = integrate.quad(
        lambda x: x ** (-1.0 - 2 * hh),
        1.0, np.inf, weight="cos", wvar=t,
        limlst=200, limit=400, full_output=1,
    )
    if rest:
        raise QuadratureFailure(f"Fourier tail quadrature failed at (h={hh}, t={t}): {rest[-1]}")
    return 2.0 * (inner + 1.0 / hh - 2.0 * osc)


def levy_scaling_check(
    h: float | HurstIndex, t1: float, t2: float, tol: float = 1e-11
) -> float:
    """Relative deviation of I(t)/t^{2h} between two frequencies.

    A small value confirms the variogram scaling v(t) proportional to
    t^{2h} under the power-law increment spectrum; symmetric in (t1, t2).
    """
    hh = _hval(h)
    if t1 <= 0 or t2 <= 0 or t1 == t2:
        raise ValueError("t1, t2 must be positive and distinct")
    r1 = levy_spectral_integral(hh, t1, tol) / t1 ** (2 * hh)
    r2 = levy_spectral_integral(hh, t2, tol) / t2 ** (2 * hh)
    return abs(r1 - r2) / max(r1, r2)

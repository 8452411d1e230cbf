"""Exact sampling of fractional Gaussian noise and fractional Brownian motion.

Lattice paths use circulant embedding (Davies & Harte 1987; Dietrich &
Newsam 1997; Dieker 2004): the Toeplitz increment covariance is embedded in
a circulant matrix diagonalized by the FFT, giving exact samples in
O(n log n).  Arbitrary finite point sets fall back to a dense Cholesky
factorization of the path covariance, exact but O(n^3).

Two-sided paths on [-N, N] are built by default from a single one-sided
increment stream of length 2N re-based at the origin
(B_n = B'_{n+N} - B'_N), which reproduces the exact joint law of a
two-sided path by stationarity of the increments.  An independent-branch
mode (two one-sided paths glued at 0) is kept for comparison; it has the
correct marginals but no correlation across the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FactorizationFailure, NegativeEigenvalueError
from .streams import StreamKey

# Relative tolerances for numerical hygiene.  fGn embeddings are
# nonnegative in exact arithmetic for every h in (0,1); eigenvalues in
# [-EIG_RTOL*max, 0) are rounding noise and are clamped to zero.
EIG_RTOL = 1e-10
CHOL_JITTER_RTOL = 1e-12

DENSE_POINT_LIMIT = 4096  # dense sampler is O(n^3); keep it at desk scale


@dataclass(frozen=True)
class HurstIndex:
    """Roughness parameter of the fractional Brownian motion, h in (0,1)."""

    h: float

    def __post_init__(self):
        if not 0.0 < self.h < 1.0:
            raise ValueError(f"Hurst index must lie strictly inside (0, 1); got {self.h}")


def _hval(h: float | HurstIndex) -> float:
    if isinstance(h, HurstIndex):
        return h.h
    return HurstIndex(float(h)).h


def fgn_autocovariance(h: float | HurstIndex, k):
    """Autocovariance gamma(k) of unit-lag fBm increments.

    gamma(k) = 0.5 * (|k+1|^{2h} - 2|k|^{2h} + |k-1|^{2h}), the covariance
    implied by Var[B_t] = |t|^{2h}.  Symmetric in k; gamma(0) = 1; negative
    for all k >= 1 exactly when h < 1/2.  Accepts scalars or arrays.
    """
    hh = _hval(h)
    k = np.abs(np.asarray(k, dtype=np.float64))
    g = 0.5 * ((k + 1.0) ** (2 * hh) - 2.0 * k ** (2 * hh) + np.abs(k - 1.0) ** (2 * hh))
    return g if g.ndim else float(g)


@dataclass(frozen=True)
class FgnCovariance:
    """Table of gamma(k) for lags 0..max_lag."""

    h: HurstIndex
    lags: np.ndarray
    gamma: np.ndarray

    def __call__(self, k: int) -> float:
        return float(self.gamma[abs(int(k))])


def fgn_covariance_table(h: float | HurstIndex, max_lag: int) -> FgnCovariance:
    hh = HurstIndex(_hval(h))
    lags = np.arange(max_lag + 1)
    return FgnCovariance(h=hh, lags=lags, gamma=fgn_autocovariance(hh, lags))


def circulant_eigenvalues(h: float | HurstIndex, n: int) -> np.ndarray:
    """Eigenvalues (length 2n) of the circulant embedding of the fGn covariance.

    The embedded first row is [gamma(0), ..., gamma(n), gamma(n-1), ..., gamma(1)];
    its unnormalized DFT is real.  Values below -EIG_RTOL*max raise
    NegativeEigenvalueError; tiny negative rounding noise is clamped to 0.
    """
    hh = _hval(h)
    if n < 2:
        raise ValueError("embedding size n must be >= 2")
    g = fgn_autocovariance(hh, np.arange(n + 1))
    row = np.concatenate([g, g[-2:0:-1]])
    lam = np.fft.rfft(row).real
    # rfft of a length-2n real vector gives n+1 values; the spectrum is
    # symmetric, so expand back to the full 2n eigenvalue multiset.
    lam = np.concatenate([lam, lam[-2:0:-1]])
    tol = EIG_RTOL * float(lam.max())
    if lam.min() < -tol:
        raise NegativeEigenvalueError(
            f"circulant embedding of fGn(h={hh}, n={n}) has eigenvalue "
            f"{lam.min():.3e} < -{tol:.3e}"
        )
    return np.clip(lam, 0.0, None)


def _fgn_pair(h: float, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two independent exact fGn vectors of length n from one complex FFT.

    With C = Q diag(lam) Q* (Q unitary DFT) and z complex standard normal,
    Re and Im of Q diag(sqrt(lam)) z are independent N(0, C) vectors.
    Noise order is fixed: real components first, then imaginary.
    """
    lam = circulant_eigenvalues(h, n)
    m = 2 * n
    zr = rng.standard_normal(m)
    zi = rng.standard_normal(m)
    w = np.fft.fft(np.sqrt(lam) * (zr + 1j * zi)) / np.sqrt(m)
    return w.real[:n].copy(), w.imag[:n].copy()


def sample_fgn(h: float | HurstIndex, n: int, key: StreamKey) -> np.ndarray:
    """Exact centered Gaussian vector with covariance gamma(|i-j|), O(n log n).

    Deterministic given the key.  Consumes the real output of the antithetic
    pair; use sample_fgn_pair to consume both at no extra FFT cost.
    """
    hh = _hval(h)
    if n < 2:
        raise ValueError("n must be >= 2")
    return _fgn_pair(hh, n, key.generator())[0]


def sample_fgn_pair(h: float | HurstIndex, n: int, key: StreamKey) -> tuple[np.ndarray, np.ndarray]:
    """Both independent fGn vectors produced by one circulant-embedding FFT."""
    hh = _hval(h)
    if n < 2:
        raise ValueError("n must be >= 2")
    return _fgn_pair(hh, n, key.generator())


@dataclass(frozen=True)
class FbmPath:
    """fBm values B_n on the symmetric integer window [-halfwidth, halfwidth]."""

    h: HurstIndex
    halfwidth: int
    values: np.ndarray = field(repr=False)
    key: StreamKey
    mode: str

    def __post_init__(self):
        if len(self.values) != 2 * self.halfwidth + 1:
            raise ValueError("values must cover 2N+1 sites")
        if self.values[self.halfwidth] != 0.0:
            raise ValueError("B_0 must be exactly zero")

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.halfwidth, self.halfwidth + 1)

    def value_at(self, n: int) -> float:
        return float(self.values[self.halfwidth + int(n)])


def sample_fbm_lattice(
    h: float | HurstIndex, N: int, key: StreamKey, mode: str = "rebased"
) -> FbmPath:
    """Exact fBm on the integer window [-N, N], B_0 = 0 exactly.

    mode="rebased" (default): one fGn stream of length 2N is cumulated into
    a path on [0, 2N] and re-based at its midpoint; by stationary increments
    this has the exact two-sided joint law, including the correlation
    between B_{-n} and B_{+m}.

    mode="independent": the two antithetic fGn outputs drive independent
    branches glued at the origin.  Marginals and within-branch laws are
    exact; cross-origin correlation is absent.
    """
    hh = _hval(h)
    if N < 1:
        raise ValueError("window halfwidth N must be >= 1")
    if mode == "rebased":
        x = sample_fgn(hh, 2 * N, key)
        b = np.concatenate([[0.0], np.cumsum(x)])
        values = b - b[N]
        values[N] = 0.0
    elif mode == "independent":
        xp, xn = sample_fgn_pair(hh, N, key) if N >= 2 else _single_site_pair(hh, key)
        pos = np.cumsum(xp)
        neg = np.cumsum(xn)
        values = np.concatenate([neg[::-1], [0.0], pos])
    else:
        raise ValueError(f"unknown fBm mode {mode!r}")
    return FbmPath(h=HurstIndex(hh), halfwidth=N, values=values, key=key, mode=mode)


def _single_site_pair(h: float, key: StreamKey) -> tuple[np.ndarray, np.ndarray]:
    # Degenerate N=1 branch: two independent unit normals.
    rng = key.generator()
    return rng.standard_normal(1), rng.standard_normal(1)


def sample_fbm_lattice_batch(
    h: float | HurstIndex,
    N: int,
    key: StreamKey,
    realizations: int,
    block: int = 4096,
) -> np.ndarray:
    """Stack of `realizations` exact re-based fBm paths, shape (M, 2N+1).

    Noise is drawn in fixed-size blocks of derived child streams
    (key.child(0), key.child(1), ...), so the result is a pure function of
    the key regardless of how callers schedule the work.
    """
    hh = _hval(h)
    if N < 1:
        raise ValueError("window halfwidth N must be >= 1")
    n = 2 * N
    lam = circulant_eigenvalues(hh, n)
    m = 2 * n
    coeff = np.sqrt(lam)
    out = np.empty((realizations, 2 * N + 1))
    for blk, lo in enumerate(range(0, realizations, block)):
        hi = min(lo + block, realizations)
        rng = key.child(blk).generator()
        zr = rng.standard_normal((hi - lo, m))
        zi = rng.standard_normal((hi - lo, m))
        w = np.fft.fft(coeff * (zr + 1j * zi), axis=1) / np.sqrt(m)
        x = w.real[:, :n]
        b = np.concatenate([np.zeros((hi - lo, 1)), np.cumsum(x, axis=1)], axis=1)
        out[lo:hi] = b - b[:, N : N + 1]
        out[lo:hi, N] = 0.0
    return out


def fbm_point_covariance(h: float | HurstIndex, points: np.ndarray) -> np.ndarray:
    """Covariance 0.5*(|s|^{2h} + |t|^{2h} - |s-t|^{2h}) on the given points."""
    hh = _hval(h)
    p = np.asarray(points, dtype=np.float64)
    ab = np.abs(p)
    return 0.5 * (
        ab[:, None] ** (2 * hh)
        + ab[None, :] ** (2 * hh)
        - np.abs(p[:, None] - p[None, :]) ** (2 * hh)
    )


def _cholesky_psd(sigma: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, retrying once with trace-scaled jitter."""
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        pass
    jitter = CHOL_JITTER_RTOL * np.trace(sigma) / max(len(sigma), 1)
    try:
        return np.linalg.cholesky(sigma + jitter * np.eye(len(sigma)))
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(
            f"covariance matrix of size {len(sigma)} is not numerically PSD "
            f"after jitter {jitter:.3e}"
        ) from exc


def sample_fbm_points(
    h: float | HurstIndex,
    points,
    key: StreamKey,
    size: int | None = None,
) -> np.ndarray:
    """Exact fBm values at an arbitrary sorted point set containing 0.

    Dense route: factorizes the path covariance restricted to the nonzero
    points (O(n^3), capped at DENSE_POINT_LIMIT points).  The value at the
    origin is exactly 0.  With size=M, returns an (M, n_points) array of
    independent draws from one stream.
    """
    hh = _hval(h)
    p = np.asarray(points, dtype=np.float64)
    if p.ndim != 1 or len(p) == 0:
        raise ValueError("points must be a nonempty 1-d array")
    if np.any(np.diff(p) <= 0):
        raise ValueError("points must be strictly increasing")
    if not np.any(p == 0.0):
        raise ValueError("points must contain 0")
    if len(p) > DENSE_POINT_LIMIT:
        raise ValueError(
            f"dense sampler limited to {DENSE_POINT_LIMIT} points; got {len(p)}"
        )
    nz = p != 0.0
    m = int(nz.sum())
    squeeze = size is None
    draws = 1 if squeeze else int(size)
    out = np.zeros((draws, len(p)))
    if m:
        sigma = fbm_point_covariance(hh, p[nz])
        chol = _cholesky_psd(sigma)
        z = key.generator().standard_normal((draws, m))
        out[:, nz] = z @ chol.T
    return out[0] if squeeze else out

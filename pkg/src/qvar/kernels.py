"""Covariance models for the example Gaussian processes.

Provides closed-form covariances R(s, t), incremental variances
d(s, t) = E(X_t - X_s)^2 and bilinear weighted-difference covariances for
Brownian motion, fractional Brownian motion, sub-fractional and bifractional
Brownian motion, plus tabulated kernels loaded from CSV.

The sub-fractional covariance implemented here is the standard literature
form R(s, t) = s^{2H} + t^{2H} - ((s+t)^{2H} + |t-s|^{2H}) / 2.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DomainError, UsageError

FAMILIES = ("bm", "fbm", "subfbm", "bifbm", "tabulated")

_GRID_TOL = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of a covariance model on [0, T].

    family : one of "bm", "fbm", "subfbm", "bifbm", "tabulated"
    hurst : Hurst index in (0, 1); ignored for "bm"
    k : bifractional second parameter in (0, 2), with hurst * k in (0, 1)
    horizon : right endpoint T > 0
    grid, gram : tabulated support (times and symmetric Gram matrix)
    """

    family: str
    hurst: float | None = None
    k: float | None = None
    horizon: float = 1.0
    grid: np.ndarray | None = field(default=None, repr=False)
    gram: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown kernel family {self.family!r}")
        if not (self.horizon > 0):
            raise ConfigError("horizon must be positive")
        if self.family in ("fbm", "subfbm", "bifbm"):
            if self.hurst is None or not (0 < self.hurst < 1):
                raise ConfigError("hurst must lie in (0, 1)")
        if self.family == "bifbm":
            if self.k is None or not (0 < self.k < 2):
                raise ConfigError("bifractional k must lie in (0, 2)")
            if not (0 < self.hurst * self.k < 1):
                raise ConfigError("bifractional requires hurst * k in (0, 1)")
        if self.family == "tabulated":
            if self.grid is None or self.gram is None:
                raise ConfigError("tabulated kernel needs grid and gram")
            grid = np.asarray(self.grid, dtype=float)
            gram = np.asarray(self.gram, dtype=float)
            if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
                raise DataError("tabulated grid must be strictly increasing")
            if gram.shape != (grid.size, grid.size):
                raise DataError("gram shape does not match grid")
            if not np.allclose(gram, gram.T, rtol=0, atol=1e-10 * max(1.0, np.abs(gram).max())):
                raise DataError("tabulated gram is not symmetric")
            lam = np.linalg.eigvalsh(0.5 * (gram + gram.T))
            lam_max = max(lam.max(), 0.0)
            if lam.min() < -1e-10 * max(lam_max, 1.0):
                raise DataError(f"tabulated gram not PSD: min eigenvalue {lam.min():g}")
            object.__setattr__(self, "grid", grid)
            object.__setattr__(self, "gram", 0.5 * (gram + gram.T))


def brownian(horizon=1.0):
    return KernelSpec("bm", horizon=horizon)


def fbm(hurst, horizon=1.0):
    return KernelSpec("fbm", hurst=hurst, horizon=horizon)


def sub_fbm(hurst, horizon=1.0):
    return KernelSpec("subfbm", hurst=hurst, horizon=horizon)


def bifbm(hurst, k, horizon=1.0):
    return KernelSpec("bifbm", hurst=hurst, k=k, horizon=horizon)


def tabulated_from_csv(path, horizon=None):
    """Load a tabulated kernel: first CSV row = grid times, rest = Gram matrix."""
    with open(path, newline="") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    if len(rows) < 2:
        raise DataError(f"{path}: expected a grid row plus Gram rows")
    grid = np.array(rows[0])
    gram = np.array(rows[1:])
    if horizon is None:
        horizon = float(grid[-1]) if grid[-1] > 0 else 1.0
    return KernelSpec("tabulated", horizon=horizon, grid=grid, gram=gram)


def _check_times(kernel, *time_arrays):
    for t in time_arrays:
        if np.any(t < 0) or np.any(t > kernel.horizon):
            raise DomainError("time outside [0, T]")


def _grid_indices(kernel, times):
    idx = np.searchsorted(kernel.grid, times)
    idx = np.clip(idx, 0, kernel.grid.size - 1)
    left = np.clip(idx - 1, 0, kernel.grid.size - 1)
    better = np.abs(kernel.grid[left] - times) < np.abs(kernel.grid[idx] - times)
    idx = np.where(better, left, idx)
    tol = _GRID_TOL * max(1.0, kernel.horizon)
    if np.any(np.abs(kernel.grid[idx] - times) > tol):
        raise DomainError("tabulated kernel queried off its grid")
    return idx


def gram_cross(kernel, times_a, times_b):
    """Matrix of R(s_i, t_j) for all pairs; vectorized closed forms."""
    s = np.atleast_1d(np.asarray(times_a, dtype=float))
    t = np.atleast_1d(np.asarray(times_b, dtype=float))
    _check_times(kernel, s, t)
    ss = s[:, None]
    tt = t[None, :]
    if kernel.family == "bm":
        return np.minimum(ss, tt)
    if kernel.family == "fbm":
        h2 = 2.0 * kernel.hurst
        return 0.5 * (ss**h2 + tt**h2 - np.abs(ss - tt) ** h2)
    if kernel.family == "subfbm":
        h2 = 2.0 * kernel.hurst
        return ss**h2 + tt**h2 - 0.5 * ((ss + tt) ** h2 + np.abs(ss - tt) ** h2)
    if kernel.family == "bifbm":
        h2 = 2.0 * kernel.hurst
        if kernel.k == 1.0:  # exactly fBm; avoid the cancelling general form
            return 0.5 * (ss**h2 + tt**h2 - np.abs(ss - tt) ** h2)
        return 2.0**-kernel.k * ((ss**h2 + tt**h2) ** kernel.k - np.abs(ss - tt) ** (h2 * kernel.k))
    ia = _grid_indices(kernel, s)
    ib = _grid_indices(kernel, t)
    return kernel.gram[np.ix_(ia, ib)]


def gram(kernel, times):
    return gram_cross(kernel, times, times)


def covariance(kernel, s, t):
    """Closed-form R(s, t); symmetric in its time arguments."""
    return float(gram_cross(kernel, [s], [t])[0, 0])


def dvar_cross(kernel, times_a, times_b):
    """Matrix of incremental variances d(s_i, t_j) = E(X_s - X_t)^2.

    Uses cancellation-free closed forms where available: the |t-s| difference
    is computed first, then raised to the power.
    """
    s = np.atleast_1d(np.asarray(times_a, dtype=float))
    t = np.atleast_1d(np.asarray(times_b, dtype=float))
    _check_times(kernel, s, t)
    ss = s[:, None]
    tt = t[None, :]
    if kernel.family == "bm":
        return np.abs(ss - tt)
    if kernel.family == "fbm":
        return np.abs(ss - tt) ** (2.0 * kernel.hurst)
    if kernel.family == "subfbm":
        h2 = 2.0 * kernel.hurst
        return -(2.0 ** (h2 - 1.0)) * (ss**h2 + tt**h2) + (ss + tt) ** h2 + np.abs(ss - tt) ** h2
    if kernel.family == "bifbm":
        h2 = 2.0 * kernel.hurst
        if kernel.k == 1.0:
            return np.abs(ss - tt) ** h2
        hk2 = h2 * kernel.k
        return (
            ss**hk2
            + tt**hk2
            - 2.0 ** (1.0 - kernel.k) * ((ss**h2 + tt**h2) ** kernel.k - np.abs(ss - tt) ** hk2)
        )
    g_ss = np.diag(gram(kernel, s))[:, None]
    g_tt = np.diag(gram(kernel, t))[None, :]
    return g_ss + g_tt - 2.0 * gram_cross(kernel, s, t)


def incremental_variance(kernel, s, t):
    """E(X_t - X_s)^2 = R(t, t) + R(s, s) - 2 R(s, t); nonnegative."""
    return float(dvar_cross(kernel, [s], [t])[0, 0])


_ZERO_SUM_TOL = 1e-12


def weighted_difference_cov(kernel, times_a, weights_a, times_b, weights_b):
    """E[(sum_i a_i X_{t_i})(sum_j b_j X_{u_j})] by bilinear expansion of R.

    When both weight vectors sum to zero the identity
    E = -1/2 * sum_ij a_i b_j d(t_i, u_j) is used instead, which avoids the
    catastrophic cancellation of the R-based expansion near the diagonal.
    """
    ta = np.asarray(times_a, dtype=float)
    wa = np.asarray(weights_a, dtype=float)
    tb = np.asarray(times_b, dtype=float)
    wb = np.asarray(weights_b, dtype=float)
    if ta.shape != wa.shape or tb.shape != wb.shape:
        raise UsageError("times and weights must have equal lengths")
    scale_a = np.abs(wa).sum() or 1.0
    scale_b = np.abs(wb).sum() or 1.0
    zero_sum = (
        abs(wa.sum()) <= _ZERO_SUM_TOL * scale_a and abs(wb.sum()) <= _ZERO_SUM_TOL * scale_b
    )
    if zero_sum and kernel.family != "tabulated":
        return float(-0.5 * wa @ dvar_cross(kernel, ta, tb) @ wb)
    return float(wa @ gram_cross(kernel, ta, tb) @ wb)


def parse_kernel(spec, horizon=1.0):
    """Parse CLI kernel strings: bm | fbm:H | subfbm:H | bifbm:H:K | tab:<path>."""
    parts = str(spec).split(":")
    name = parts[0].lower()
    try:
        if name == "bm":
            return brownian(horizon)
        if name == "fbm":
            return fbm(float(parts[1]), horizon)
        if name == "subfbm":
            return sub_fbm(float(parts[1]), horizon)
        if name == "bifbm":
            return bifbm(float(parts[1]), float(parts[2]), horizon)
        if name in ("tab", "tabulated"):
            return tabulated_from_csv(":".join(parts[1:]))
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"bad kernel spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown kernel spec {spec!r}")

"""Difference schemes mapping (kernel, partition) to the Gaussian vector Y.

Each scheme produces rows (times, weights) so that Y_k is the corresponding
weighted combination of process values, normalization included:

* first order:  Y_k = (X_{t_k} - X_{t_{k-1}}) / sqrt(phi(dt_k))
* second order (Begyn): Y_k = sqrt(dt_{k+1}) * DX_k / sqrt(E DX_k^2) with
  DX_k = dt_{k+1} X_{t_{k-1}} + dt_k X_{t_{k+1}} - (dt_{k+1} + dt_k) X_{t_k}
* a-differences: Y_j = sum_k a_k X_{t_{j+k}} / sqrt(n E (.)^2) on a uniform
  grid of step delta

The second-order normalization uses dt_{k+1}, matching the definition of the
variation (the proof-side dt_k variant coincides with it on uniform grids).
All stencils have zero-sum weights, so covariances are evaluated through the
cancellation-free incremental-variance expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import DataError, DegenerateError, UsageError
from .kernels import KernelSpec
from .partitions import Partition

_SYM_TOL = 1e-12


# --- scaling functions ------------------------------------------------------


@dataclass(frozen=True)
class PowerGamma:
    """phi(x) = x**gamma."""

    gamma: float

    def __post_init__(self):
        if not np.isfinite(self.gamma):
            raise UsageError("power exponent must be finite")

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** self.gamma


@dataclass(frozen=True)
class One:
    """phi identically 1."""

    def __call__(self, x):
        return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class CustomPhi:
    """Tabulated positive phi with log-log linear interpolation."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.size != ys.size or xs.size < 2:
            raise UsageError("CustomPhi needs matching tables of length >= 2")
        if np.any(xs <= 0) or np.any(ys <= 0) or np.any(np.diff(xs) <= 0):
            raise UsageError("CustomPhi tables must be positive with increasing xs")
        object.__setattr__(self, "xs", tuple(xs))
        object.__setattr__(self, "ys", tuple(ys))

    def __call__(self, x):
        lx = np.log(np.asarray(x, dtype=float))
        return np.exp(np.interp(lx, np.log(self.xs), np.log(self.ys)))


# --- schemes ----------------------------------------------------------------


@dataclass(frozen=True)
class FirstOrder:
    phi: object = One()


@dataclass(frozen=True)
class SecondOrderBegyn:
    pass


@dataclass(frozen=True)
class GeneralA:
    weights: tuple
    step: float

    def __post_init__(self):
        a = np.asarray(self.weights, dtype=float)
        if a.size < 2:
            raise UsageError("a-vector needs at least two weights")
        if abs(a.sum()) > 1e-14 * max(1.0, np.abs(a).sum()):
            raise UsageError("a-vector weights must sum to zero")
        if not (self.step > 0):
            raise UsageError("step must be positive")
        object.__setattr__(self, "weights", tuple(a))


@dataclass(frozen=True)
class CovMatrix:
    """Dense symmetric covariance matrix of the vector Y."""

    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.values, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DataError("covariance matrix must be square")
        scale = np.abs(g).max() if g.size else 0.0
        if scale and np.abs(g - g.T).max() > _SYM_TOL * scale:
            raise DataError("covariance matrix is not symmetric")
        if g.size and np.diag(g).min() < -_SYM_TOL * max(scale, 1.0):
            raise DataError("covariance matrix has negative diagonal")
        g = 0.5 * (g + g.T)
        g.flags.writeable = False
        object.__setattr__(self, "values", g)

    @property
    def dim(self):
        return int(self.values.shape[0])

    def to_csv(self, path):
        np.savetxt(path, self.values, delimiter=",")

    @classmethod
    def from_csv(cls, path):
        return cls(np.atleast_2d(np.loadtxt(path, delimiter=",")))


# --- stencil assembly -------------------------------------------------------


def _stencils(scheme, p: Partition, kernel: KernelSpec | None):
    """Index/weight arrays (rows x width) into p.points, fully normalized."""
    pts = p.points
    n_pts = pts.size
    gaps = p.gaps
    if isinstance(scheme, FirstOrder):
        if n_pts < 2:
            raise UsageError("first-order scheme needs >= 2 points")
        rows = n_pts - 1
        idx = np.column_stack([np.arange(rows), np.arange(1, rows + 1)])
        scale = 1.0 / np.sqrt(scheme.phi(gaps))
        wts = np.column_stack([-scale, scale])
        return idx, wts
    if isinstance(scheme, SecondOrderBegyn):
        if n_pts < 3:
            raise UsageError("second-order scheme needs >= 3 points")
        if kernel is None:
            raise UsageError("second-order scheme needs a kernel for normalization")
        rows = n_pts - 2
        k = np.arange(1, rows + 1)
        idx = np.column_stack([k - 1, k, k + 1])
        dt_k = gaps[k - 1]
        dt_k1 = gaps[k]
        raw = np.column_stack([dt_k1, -(dt_k1 + dt_k), dt_k])
        var = _row_variances(idx, raw, pts, kernel)
        if np.any(var <= 0):
            raise DegenerateError("zero second-difference variance")
        wts = raw * (np.sqrt(dt_k1) / np.sqrt(var))[:, None]
        return idx, wts
    if isinstance(scheme, GeneralA):
        a = np.asarray(scheme.weights)
        n_steps = n_pts - 1
        if n_steps < a.size - 1:
            raise UsageError("partition too small for the a-vector stencil")
        if kernel is None:
            raise UsageError("a-difference scheme needs a kernel for normalization")
        if np.abs(gaps - scheme.step).max() > 1e-9 * scheme.step:
            raise UsageError("a-difference scheme requires a uniform grid of the given step")
        p_ord = a.size - 1
        j = np.arange(n_steps - p_ord + 1)
        idx = j[:, None] + np.arange(a.size)[None, :]
        raw = np.broadcast_to(a, idx.shape).copy()
        var = _row_variances(idx, raw, pts, kernel)
        if np.any(var <= 0):
            raise DegenerateError("zero a-difference variance")
        wts = raw / np.sqrt(n_steps * var)[:, None]
        return idx, wts
    raise UsageError(f"unknown scheme {scheme!r}")


def _row_variances(idx, wts, pts, kernel):
    out = np.empty(idx.shape[0])
    for r in range(idx.shape[0]):
        t = pts[idx[r]]
        out[r] = -0.5 * wts[r] @ kernels.dvar_cross(kernel, t, t) @ wts[r]
    return out


def weight_rows(scheme, p: Partition, kernel: KernelSpec | None = None):
    """Rows (times, weights) encoding Y_k, normalization included."""
    idx, wts = _stencils(scheme, p, kernel)
    return [(p.points[idx[r]], wts[r].copy()) for r in range(idx.shape[0])]


def _sparse_weights(idx, wts, n_pts):
    rows = np.repeat(np.arange(idx.shape[0]), idx.shape[1])
    return sp.csr_matrix((wts.ravel(), (rows, idx.ravel())), shape=(idx.shape[0], n_pts))


def build_gamma(scheme, p: Partition, kernel: KernelSpec) -> CovMatrix:
    """Exact covariance matrix of Y: Gamma_jk = E[Y_j Y_k]."""
    idx, wts = _stencils(scheme, p, kernel)
    w = _sparse_weights(idx, wts, p.points.size)
    d = kernels.dvar_cross(kernel, p.points, p.points)
    wd = w @ d
    g = -0.5 * np.asarray(w @ wd.T)
    return CovMatrix(0.5 * (g + g.T))


def build_cross_gamma(scheme, p_n: Partition, p_m: Partition, kernel: KernelSpec):
    """Cross covariances E[Y_k^{(n)} Y_j^{(m)}] across two partitions."""
    idx_n, wts_n = _stencils(scheme, p_n, kernel)
    idx_m, wts_m = _stencils(scheme, p_m, kernel)
    w_n = _sparse_weights(idx_n, wts_n, p_n.points.size)
    w_m = _sparse_weights(idx_m, wts_m, p_m.points.size)
    d = kernels.dvar_cross(kernel, p_n.points, p_m.points)
    return -0.5 * np.asarray(w_m @ (w_n @ d).T).T


def parse_scheme(spec):
    """Parse first:phi=pow:<g> | first:phi=one | begyn2 | gen-a:<a0,..,ap>:<step>."""
    s = str(spec)
    try:
        if s == "begyn2":
            return SecondOrderBegyn()
        if s.startswith("first"):
            rest = s[len("first"):].lstrip(":")
            if rest in ("", "phi=one"):
                return FirstOrder(One())
            if rest.startswith("phi=pow:"):
                return FirstOrder(PowerGamma(float(rest.split(":", 1)[1])))
        if s.startswith("gen-a:"):
            _, a_part, step_part = s.split(":")
            a = tuple(float(x) for x in a_part.split(","))
            return GeneralA(a, float(step_part))
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad scheme spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown scheme spec {spec!r}")

"""Realized variations on observed paths and scale-exponent estimation.

The Hurst estimator is a plain dyadic log-log regression: slope s of
log sum (increments)^2 against log n maps to H = (1 - s) / 2.  It is exact on
inputs whose level sums follow an exact power law and is one of many valid
estimators this family of limit theorems motivates.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import schemes
from .errors import DataError, UsageError
from .partitions import Partition, make_uniform

_MATCH_RTOL = 1e-9


@dataclass(frozen=True)
class PathSample:
    """One observed path: values at strictly increasing times."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise DataError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise DataError("times must be strictly increasing")
        for name, arr in (("times", t), ("values", v)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class EstimateReport:
    levels: tuple
    level_stats: tuple
    slope: float
    hurst: float
    residual: float

    def to_json(self, path=None):
        doc = {
            "levels": list(self.levels),
            "level_stats": list(self.level_stats),
            "slope": self.slope,
            "hurst": self.hurst,
            "residual": self.residual,
        }
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
        return doc


def path_from_csv(path) -> PathSample:
    """Two-column CSV `time,value` with a header row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["time", "value"]:
            raise DataError(f"{path}: expected header 'time,value'")
        times, values = [], []
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                times.append(float(row[0]))
                values.append(float(row[1]))
            except (IndexError, ValueError) as exc:
                raise DataError(f"{path}: bad row {i}: {exc}") from exc
    t = np.array(times)
    bad = np.nonzero(np.diff(t) <= 0)[0]
    if bad.size:
        raise DataError(f"{path}: non-increasing time at row {int(bad[0]) + 3}")
    return PathSample(t, np.array(values))


def path_to_csv(path_sample: PathSample, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "value"])
        for t, v in zip(path_sample.times, path_sample.values):
            writer.writerow([repr(float(t)), repr(float(v))])


def _locate(path: PathSample, query_times):
    """Indices of query times within the path times; error on mismatch."""
    tol = _MATCH_RTOL * max(1.0, float(path.times[-1]))
    idx = np.searchsorted(path.times, query_times)
    idx = np.clip(idx, 0, path.times.size - 1)
    left = np.clip(idx - 1, 0, path.times.size - 1)
    better = np.abs(path.times[left] - query_times) < np.abs(path.times[idx] - query_times)
    idx = np.where(better, left, idx)
    if np.any(np.abs(path.times[idx] - query_times) > tol):
        raise DataError("partition points are not sampled in the path")
    return idx


def realized_stat(path, scheme, p: Partition, alpha=2.0, kernel_for_normalization=None):
    """sum_k |Y_k|^alpha from observed values via the scheme's weight rows."""
    if alpha < 1:
        raise UsageError("alpha must be >= 1")
    needs_kernel = not isinstance(scheme, schemes.FirstOrder)
    if needs_kernel and kernel_for_normalization is None:
        raise UsageError("this scheme needs a kernel for its normalization")
    rows = schemes.weight_rows(scheme, p, kernel_for_normalization)
    total = 0.0
    for times, weights in rows:
        y = float(weights @ path.values[_locate(path, times)])
        total += abs(y) ** alpha
    return total


def _unnormalized_level_stat(path, scheme, level):
    """sum (stencil difference)^2 on the uniform sub-grid with `level` steps."""
    horizon = float(path.times[-1])
    p = make_uniform(level, horizon)
    idx = _locate(path, p.points)
    x = path.values[idx]
    if isinstance(scheme, schemes.FirstOrder):
        d = np.diff(x)
    elif isinstance(scheme, schemes.SecondOrderBegyn):
        h = horizon / level
        d = h * (x[2:] - 2.0 * x[1:-1] + x[:-2])
    elif isinstance(scheme, schemes.GeneralA):
        a = np.asarray(scheme.weights)
        d = np.convolve(x, a[::-1], mode="valid")
    else:
        raise UsageError(f"unknown scheme {scheme!r}")
    return float((d * d).sum())


def hurst_estimate(path, levels, scheme=schemes.FirstOrder()) -> EstimateReport:
    """Dyadic log-log regression of unnormalized squared variations."""
    levels = [int(n) for n in levels]
    if len(levels) < 2:
        raise UsageError("need at least two levels")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise UsageError("levels must be strictly increasing")
    stats = [_unnormalized_level_stat(path, scheme, n) for n in levels]
    if any(s <= 0 for s in stats):
        raise DataError("level statistic is zero; cannot fit a log-log slope")
    x = np.log(np.asarray(levels, dtype=float))
    y = np.log(np.asarray(stats))
    (slope, intercept), res = np.polyfit(x, y, 1), 0.0
    res = float(((y - (slope * x + intercept)) ** 2).sum())
    return EstimateReport(
        levels=tuple(levels),
        level_stats=tuple(stats),
        slope=float(slope),
        hurst=(1.0 - float(slope)) / 2.0,
        residual=res,
    )


def alpha_limit_constant(hurst: float) -> float:
    """E|N|^(1/H) for standard normal N, by adaptive quadrature."""
    if not (0 < hurst < 1):
        raise UsageError("hurst must lie in (0, 1)")
    p = 1.0 / hurst

    def integrand(x):
        return x**p * math.exp(-0.5 * x * x)

    val, _ = quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return 2.0 * val / math.sqrt(2.0 * math.pi)


def absolute_normal_moment(p: float) -> float:
    """Closed form E|N|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)."""
    return 2.0 ** (p / 2.0) * math.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)

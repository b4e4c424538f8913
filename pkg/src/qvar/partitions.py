"""Partition grids of [0, T] with mesh / min-mesh / ratio metadata."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError


@dataclass(frozen=True)
class Partition:
    """Strictly increasing grid 0 = t_0 < ... < t_{N-1} = T."""

    points: np.ndarray
    mesh: float
    min_mesh: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise DataError("partition needs at least two points")
        if pts[0] != 0.0:
            raise DataError("partition must start at 0")
        if np.any(np.diff(pts) <= 0):
            raise DataError("partition points must be strictly increasing")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise DataError("partition needs at least two points")
        gaps = np.diff(pts)
        return cls(pts, float(gaps.max()), float(gaps.min()))

    @property
    def horizon(self):
        return float(self.points[-1])

    @property
    def count(self):
        """Number of grid points N(pi_n)."""
        return int(self.points.size)

    @property
    def gaps(self):
        return np.diff(self.points)


def ratio(p: Partition) -> float:
    """Regularity measure mesh / min_mesh >= 1."""
    return p.mesh / p.min_mesh


def make_uniform(n: int, horizon: float) -> Partition:
    """Uniform grid with n steps of size T/n."""
    if n < 1:
        raise UsageError("n must be >= 1")
    if horizon <= 0:
        raise UsageError("horizon must be positive")
    h = horizon / n
    pts = np.arange(n + 1) * h
    pts[-1] = horizon
    return Partition(pts, h, h)


def make_perturbed(n: int, horizon: float, ratio_cap: float, seed: int) -> Partition:
    """Jittered uniform grid with mesh/min_mesh <= ratio_cap, deterministic in seed.

    Each interior point is moved by at most (T/n)*(c-1)/(2(c+1)), which bounds
    every gap in [h*2/(c+1), h*2c/(c+1)] and hence the ratio by c without any
    rejection step.
    """
    if ratio_cap < 1:
        raise UsageError("ratio_cap must be >= 1")
    base = make_uniform(n, horizon)
    if n < 2 or ratio_cap == 1:
        return base
    h = horizon / n
    amp = h * (ratio_cap - 1.0) / (2.0 * (ratio_cap + 1.0))
    rng = np.random.Generator(np.random.Philox(key=seed))
    pts = np.array(base.points)
    pts[1:-1] += rng.uniform(-amp, amp, size=n - 1)
    return Partition.from_points(pts)


def dyadic_schedule(j_min: int, j_max: int, horizon: float = 1.0):
    """Uniform partitions for n = 2^j, j = j_min..j_max."""
    if j_max < j_min:
        raise UsageError("j_max must be >= j_min")
    return [(2**j, make_uniform(2**j, horizon)) for j in range(j_min, j_max + 1)]


def mesh_vs_log(schedule):
    """Pairs (n, mesh * log n) for a schedule of (n, Partition)."""
    return [(n, p.mesh * np.log(n)) for n, p in schedule]


def to_csv(p: Partition, path):
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerow(repr(float(x)) for x in p.points)


def from_csv(path) -> Partition:
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if len(rows) != 1:
        raise DataError(f"{path}: expected a single CSV row of times")
    return Partition.from_points([float(x) for x in rows[0]])


def parse_partition(spec, horizon=1.0) -> Partition:
    """Parse uniform:n | perturbed:n:cap:seed | file:<path>."""
    parts = str(spec).split(":")
    kind = parts[0].lower()
    try:
        if kind == "uniform":
            return make_uniform(int(parts[1]), horizon)
        if kind == "perturbed":
            return make_perturbed(int(parts[1]), horizon, float(parts[2]), int(parts[3]))
        if kind == "file":
            return from_csv(":".join(parts[1:]))
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad partition spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown partition spec {spec!r}")

"""Monte Carlo verification: sample Y from Gamma and study V = ||Y||^2.

RNG contract: replicate r draws its standard normals from an independent
Philox counter-based substream keyed by (seed, r).  Results are therefore
bit-identical regardless of execution order, chunking or worker count, as
long as the aggregation happens in replicate-index order (it does: replicate
values are stored into a preallocated array by index).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import NotPSDError, UsageError
from .schemes import CovMatrix
from .spectral import _matrix

DEFAULT_JITTER = 1e-10


@dataclass(frozen=True)
class McConfig:
    replicates: int
    seed: int
    jitter: float = DEFAULT_JITTER

    def __post_init__(self):
        if self.replicates < 1:
            raise UsageError("replicates must be >= 1")


@dataclass(frozen=True)
class McResult:
    replicates: int
    empirical_mean: float
    empirical_var: float
    empirical_fourth_central: float
    ks_distance: float
    se_mean: float
    se_var: float

    def to_json(self, path=None):
        doc = {
            "replicates": self.replicates,
            "empirical_mean": self.empirical_mean,
            "empirical_var": self.empirical_var,
            "empirical_fourth_central": self.empirical_fourth_central,
            "ks_distance": self.ks_distance,
            "se_mean": self.se_mean,
            "se_var": self.se_var,
        }
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
        return doc


def factorize(g, jitter=DEFAULT_JITTER):
    """Factor F with F F^T = Gamma via symmetric eigendecomposition.

    Eigenvalues in [-jitter * lam_max, 0) are clipped to zero; anything more
    negative raises NotPSDError.  The eigenvector route tolerates the tiny
    negative eigenvalues that near-singular fractional Gram matrices produce.
    """
    m = _matrix(g)
    lam, q = np.linalg.eigh(0.5 * (m + m.T))
    lam_max = max(float(lam.max()), 0.0)
    floor = -jitter * max(lam_max, 1e-300)
    if lam.min() < floor:
        raise NotPSDError(
            f"matrix not PSD: eigenvalue {lam.min():g} below {floor:g}",
            offending_value=float(lam.min()),
        )
    return q * np.sqrt(np.clip(lam, 0.0, None))


def _substream_normals(seed, replicate, size):
    gen = np.random.Generator(np.random.Philox(key=[int(seed), int(replicate)]))
    return gen.standard_normal(size)


def sample_v_replicates(g, cfg: McConfig, first_replicate=0):
    """Replicate values of the uncentered sum V = sum_k Y_k^2.

    `first_replicate` shifts the replicate index range to
    [first_replicate, first_replicate + cfg.replicates).  Because replicate r
    depends only on (seed, r), workers sampling disjoint index ranges and
    concatenating by index reproduce a single full run bit for bit.
    """
    f = factorize(g, cfg.jitter)
    n = f.shape[0]
    out = np.empty(cfg.replicates)
    chunk = max(1, min(cfg.replicates, 8 * 1024 * 1024 // max(n, 1)))
    for start in range(0, cfg.replicates, chunk):
        stop = min(start + chunk, cfg.replicates)
        xi = np.empty((n, stop - start))
        for r in range(start, stop):
            xi[:, r - start] = _substream_normals(cfg.seed, first_replicate + r, n)
        y = f @ xi
        out[start:stop] = (y * y).sum(axis=0)
    return out


def sample_paths(kernel, times, cfg: McConfig):
    """Sample process values at the given times; one column per replicate."""
    from . import kernels as _k

    times = np.asarray(times, dtype=float)
    gram = _k.gram(kernel, times)
    f = factorize(CovMatrix(0.5 * (gram + gram.T)), cfg.jitter)
    n = times.size
    xi = np.empty((n, cfg.replicates))
    for r in range(cfg.replicates):
        xi[:, r] = _substream_normals(cfg.seed, r, n)
    return f @ xi


def normal_cdf(x):
    """Standard normal CDF via the complementary error function.

    scipy's ndtr evaluates 0.5 * erfc(-x / sqrt(2)) with absolute error well
    below 1e-12 over the whole real line.
    """
    return ndtr(np.asarray(x, dtype=float))


def ks_distance(sample):
    """Exact sup-distance between the sample ECDF and the standard normal."""
    z = np.sort(np.asarray(sample, dtype=float))
    n = z.size
    cdf = normal_cdf(z)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


def empirical_stats(vs, center, scale) -> McResult:
    """Empirical moments and KS normality distance of (v - center) / scale."""
    vs = np.asarray(vs, dtype=float)
    if vs.size < 2:
        raise UsageError("need at least two replicate values")
    if not (scale > 0):
        raise UsageError("scale must be positive")
    z = (vs - center) / scale
    n = z.size
    mean = float(z.mean())
    var = float(z.var(ddof=1))
    m4 = float(((z - mean) ** 4).mean())
    se_mean = math.sqrt(var / n)
    # SE of the sample variance from the fourth/second moment relation
    se_var = math.sqrt(max(m4 - var**2, 0.0) / n)
    return McResult(
        replicates=int(n),
        empirical_mean=mean,
        empirical_var=var,
        empirical_fourth_central=m4,
        ks_distance=ks_distance(z),
        se_mean=se_mean,
        se_var=se_var,
    )

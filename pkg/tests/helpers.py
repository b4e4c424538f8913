"""Shared independent oracles for the test suite.

Everything here is computed by a route different from the library code it
checks: direct covariance formulas, explicit Toeplitz assembly, and a
midpoint-displacement construction whose dyadic quadratic variations follow
an exact power law by design.
"""

import numpy as np


def fbm_cov(s, t, hurst):
    """Fractional Brownian covariance, scalar closed form."""
    h2 = 2.0 * hurst
    return 0.5 * (s**h2 + t**h2 - abs(s - t) ** h2)


def fbm_increment_corr(lag, hurst):
    """rho_H(lag) = Cov of unit-spaced fBm increments at the given lag."""
    h2 = 2.0 * hurst
    k = abs(int(lag))
    return 0.5 * ((k + 1) ** h2 + abs(k - 1) ** h2 - 2.0 * k**h2)


def fbm_gamma_uniform(n, hurst, horizon=1.0):
    """Toeplitz oracle for the first-order fBm covariance matrix.

    Uniform grid with n steps, scaling phi(x) = x^{2H-1}, so that
    Gamma_jk = h * rho_H(j - k) with h = T / n.
    """
    h = horizon / n
    lags = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    rho = np.array([fbm_increment_corr(k, hurst) for k in range(n)])
    return h * rho[lags]


def random_psd(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return scale * (a @ a.T)


def power_law_path(hurst, j_max, seed=0):
    """Path on [0, 1] whose dyadic quadratic variations are an exact power law.

    Built by midpoint displacement: refining level j to j+1 splits each
    increment D into D/2 + d and D/2 - d, so the squared-increment sum obeys
    S_{j+1} = S_j / 2 + 2^{j+1} d_j^2.  Choosing d_j to satisfy
    S_j = (2^j)^{1 - 2H} exactly makes the log-log regression of S against n
    recover H to machine precision.  Displacement signs are randomized; the
    sum of squares does not depend on them.
    """
    if not (0 < hurst < 1):
        raise ValueError("hurst must lie in (0, 1)")
    rng = np.random.Generator(np.random.Philox(key=seed))
    values = np.array([0.0, 1.0])
    for j in range(j_max):
        target_next = 2.0 ** ((j + 1) * (1.0 - 2.0 * hurst))
        target_here = 2.0 ** (j * (1.0 - 2.0 * hurst))
        d2 = (target_next - 0.5 * target_here) / 2.0 ** (j + 1)
        d = np.sqrt(d2)
        signs = rng.choice([-1.0, 1.0], size=values.size - 1)
        mids = 0.5 * (values[:-1] + values[1:]) + signs * d
        out = np.empty(2 * values.size - 1)
        out[0::2] = values
        out[1::2] = mids
        values = out
    times = np.linspace(0.0, 1.0, values.size)
    return times, values

"""Convergence diagnostics: energy, planar variation, a.s. and CLT conditions.

Asymptotic o(.) statements cannot be decided from finitely many levels, so
`as_classify` reports a trend verdict (monotone decrease plus negative
log-log tail slope) together with the raw sequences; it is evidence, not
proof.  Berry-Esseen quantities are reported without the unspecified
constants; callers may scale by their own multiplier.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, fields

import numpy as np

from . import schemes, spectral
from .errors import DegenerateError, UsageError
from .spectral import MomentReport


@dataclass(frozen=True)
class ConditionReport:
    """Per-level condition values; CSV columns follow field order."""

    n: int
    energy: float
    planar_nn: float
    spectral_logn: float
    one_norm_h: float
    clt_ratio: float
    lindeberg_ratio: float
    be_quantity: float
    be_lambda_bound: float


def energy_trace(g) -> float:
    """trace(Gamma) = sum_k E(Y_k)^2."""
    return float(np.trace(spectral._matrix(g)))


def planar_variation(scheme, kernel, p_n, p_m) -> float:
    """Sum of squared cross covariances over two refinement levels."""
    cross = schemes.build_cross_gamma(scheme, p_n, p_m, kernel)
    return float((cross * cross).sum())


def clt_ratios(m: MomentReport):
    """(sum lam^4 / (sum lam^2)^2, lambda* / sqrt(Var V))."""
    if not (m.var_vn > 0):
        raise DegenerateError("Var(V_n) must be positive")
    lam = m.eigenvalues
    s2 = float((lam**2).sum())
    s4 = float((lam**4).sum())
    return s4 / s2**2, m.lambda_star / math.sqrt(m.var_vn)


def berry_esseen(m: MomentReport, n: int):
    """Constant-free bounds: (sqrt(excess kurtosis), sqrt(n) * lambda*)."""
    if not (m.var_vn > 0):
        raise DegenerateError("Var(V_n) must be positive")
    return math.sqrt(max(0.0, m.kurtosis_excess)), math.sqrt(n) * m.lambda_star


def condition_report(n: int, g) -> ConditionReport:
    """All condition values for one level from its covariance matrix.

    The spectral norm is read off the eigenvalues that the moment computation
    needs anyway, so the matrix is diagonalized exactly once per level.
    """
    m = spectral._matrix(g)
    mr = spectral.qv_moments(g)
    clt, lind = clt_ratios(mr)
    be_q, be_l = berry_esseen(mr, n)
    return ConditionReport(
        n=int(n),
        energy=float(np.trace(m)),
        planar_nn=float((m * m).sum()),
        spectral_logn=mr.lambda_star * math.log(n),
        one_norm_h=float(np.abs(m).sum(axis=0).max()),
        clt_ratio=clt,
        lindeberg_ratio=lind,
        be_quantity=be_q,
        be_lambda_bound=be_l,
    )


def _tail_slope(ns, values):
    """Least-squares log-log slope over the tail half of the schedule."""
    k = len(ns)
    start = k // 2 if k >= 4 else 0
    x = np.log(np.asarray(ns[start:], dtype=float))
    y = np.log(np.asarray(values[start:], dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def as_classify(schedule):
    """Trend verdict for the almost-sure condition ||Gamma||_2 = o(1/log n).

    schedule: list of (n, CovMatrix) with strictly increasing n.  Returns
    (rows, verdict) where rows are (n, spectral, spectral * log n) and the
    verdict is "as_sufficient", "prob_only" or "no_conclusion".
    """
    if len(schedule) < 2:
        raise UsageError("need at least two levels to classify")
    ns = [n for n, _ in schedule]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise UsageError("levels must be strictly increasing")
    specs = [spectral.norms(g).spectral for _, g in schedule]
    slogs = [s * math.log(n) for n, s in zip(ns, specs)]
    rows = list(zip(ns, specs, slogs))
    decreasing_slog = all(b < a for a, b in zip(slogs, slogs[1:]))
    if decreasing_slog and _tail_slope(ns, slogs) < 0:
        return rows, "as_sufficient"
    decreasing_spec = all(b < a for a, b in zip(specs, specs[1:]))
    if decreasing_spec and _tail_slope(ns, specs) < 0:
        return rows, "prob_only"
    return rows, "no_conclusion"


def reports_to_csv(reports, path):
    cols = [f.name for f in fields(ConditionReport)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for r in reports:
            writer.writerow([getattr(r, c) if c == "n" else repr(getattr(r, c)) for c in cols])


def reports_to_json(reports, path=None):
    docs = [{f.name: getattr(r, f.name) for f in fields(ConditionReport)} for r in reports]
    if path is not None:
        with open(path, "w") as fh:
            json.dump(docs, fh, indent=2)
            fh.write("\n")
    return docs

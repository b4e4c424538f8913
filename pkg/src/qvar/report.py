"""Render study figures (log-log condition trends) next to the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_study_figures(reports, outdir):
    """Write PNG figures for a list of ConditionReport rows; returns paths."""
    ns = np.array([r.n for r in reports], dtype=float)
    written = []

    fig, ax = plt.subplots(figsize=(6, 4))
    for attr, label in [
        ("clt_ratio", "eigenvalue ratio"),
        ("lindeberg_ratio", "Lindeberg ratio"),
        ("be_quantity", "sqrt excess kurtosis"),
        ("be_lambda_bound", "sqrt(n) * lambda*"),
    ]:
        vals = np.array([getattr(r, attr) for r in reports])
        if np.all(vals > 0):
            ax.loglog(ns, vals, marker="o", label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("condition value")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = f"{outdir}/clt_conditions.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    for attr, label in [
        ("spectral_logn", "spectral norm * log n"),
        ("one_norm_h", "one-norm"),
        ("planar_nn", "squared Frobenius"),
        ("energy", "energy (trace)"),
    ]:
        vals = np.array([getattr(r, attr) for r in reports])
        if np.all(vals > 0):
            ax.loglog(ns, vals, marker="s", label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("value")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = f"{outdir}/convergence_conditions.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    return written

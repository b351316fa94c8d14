"""Convergence figures for per-iteration traces."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure


def _positive(values):
    # log axes cannot show zeros; clamp them to the smallest positive float
    arr = np.asarray(values, dtype=float)
    return np.where(arr > 0, arr, np.finfo(float).tiny)


def plot_trace(records, path, title=""):
    """Write a three-panel convergence figure for one run.

    Panels show the cost, the outer step norm and the constraint residuals
    against the outer iteration index. The file format follows the suffix of
    ``path`` (png, pdf, svg).
    """
    path = Path(path)
    iters = [r.iteration for r in records]
    cost = [r.cost for r in records]
    step = [r.step_norm for r in records]
    eq = [r.max_eq_residual for r in records]
    ineq = [r.max_ineq_value for r in records]

    fig = Figure(figsize=(6.0, 7.0), constrained_layout=True)
    ax_cost, ax_step, ax_res = fig.subplots(3, 1, sharex=True)

    ax_cost.plot(iters, cost, marker=".", lw=1.0, color="C0")
    if cost and min(cost) > 0:
        ax_cost.set_yscale("log")
    ax_cost.set_ylabel("cost")

    ax_step.semilogy(iters, _positive(step), marker=".", lw=1.0, color="C1")
    ax_step.set_ylabel(r"$\|x_k - x_{k-1}\|$")

    has_eq = any(v > 0 for v in eq)
    has_ineq = any(not math.isnan(v) for v in ineq)
    if has_eq:
        ax_res.semilogy(iters, _positive(eq), marker=".", lw=1.0, label="max |equality|")
    if has_ineq:
        violation = [max(v, 0.0) if not math.isnan(v) else 0.0 for v in ineq]
        ax_res.semilogy(iters, _positive(violation), marker=".", lw=1.0, label="max inequality violation")
    if has_eq or has_ineq:
        ax_res.legend(frameon=False, fontsize="small")
    else:
        ax_res.text(0.5, 0.5, "no constraints", transform=ax_res.transAxes, ha="center", va="center")
    ax_res.set_ylabel("residual")
    ax_res.set_xlabel("outer iteration")

    if title:
        fig.suptitle(title)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    return path

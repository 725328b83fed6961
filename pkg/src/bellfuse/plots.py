"""Matplotlib rendering for the CLI report paths.

Figures are written next to the delimited output: the sweep gets a logical
error-rate curve with its confidence band and the predicted threshold line;
the threshold report gets the logical-channel recursion map with its fixed
point.  Everything uses the Agg backend; nothing opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_sweep(rows: list[dict], path: str, p_crit: float | None = None,
                 title: str = "") -> str:
    """Logical error rate vs p with Wilson band; optional threshold marker."""
    p = np.array([r["p"] for r in rows])
    rate = np.array([r["logical_error_rate"] for r in rows])
    lo = np.array([r["ci_low"] for r in rows])
    hi = np.array([r["ci_high"] for r in rows])
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.fill_between(p, np.maximum(lo, 1e-12), np.maximum(hi, 1e-12),
                    alpha=0.25, color="tab:blue", label="95% Wilson band")
    ax.plot(p, np.maximum(rate, 1e-12), "o-", color="tab:blue", label="logical error rate")
    floor = max(min(r for r in rate if r > 0), 1e-7) / 3 if rate.any() else 1e-7
    if p_crit is not None and p.min() <= p_crit <= p.max():
        ax.axvline(p_crit, color="tab:red", ls="--", lw=1.2,
                   label=f"p_crit = {p_crit:.4f}")
    ax.set_yscale("log")
    ax.set_ylim(bottom=floor)
    ax.set_xlabel("depolarizing parameter p per resource-state qubit")
    ax.set_ylabel("logical error rate per EC round")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", ls=":", alpha=0.5)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_recursion(code_name: str, xs: np.ndarray, q_ls: np.ndarray,
                     fixed_point: float, path: str) -> str:
    """The map x -> q_L(x) against the diagonal, fixed point marked."""
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    ax.plot(xs, q_ls, color="tab:blue", label="q_L(x) after one EC round")
    ax.plot(xs, xs, color="0.5", ls=":", label="q_L = x")
    ax.axvline(fixed_point, color="tab:red", ls="--", lw=1.2,
               label=f"fixed point = {fixed_point:.4f}")
    ax.set_xlabel("input depolarizing parameter x")
    ax.set_ylabel("logical depolarizing parameter q_L")
    ax.set_title(f"{code_name}: concatenation recursion")
    ax.grid(True, ls=":", alpha=0.5)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

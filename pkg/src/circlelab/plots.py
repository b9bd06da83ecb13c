"""Matplotlib renderings of CLI reports, written next to the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_probe_figure(report, path: str) -> None:
    """Attracting count against the rotation offset, one curve per amplitude."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for stage in report.stages:
        ax1.plot(stage.r_grid, stage.counts, drawstyle="steps-mid", label=f"a = {stage.a:g}")
    ax1.set_xlabel("r")
    ax1.set_ylabel(f"attracting orbits at {report.p}/{report.q}")
    ax1.legend(fontsize=8)
    a_vals = [s.a for s in report.stages]
    ax2.semilogx(a_vals, [s.max_attracting for s in report.stages], "o-")
    ax2.set_xlabel("a")
    ax2.set_ylabel("max attracting count")
    title = f"estimate = {report.estimate}" if report.stabilized else "not stabilized"
    ax2.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_census_figure(census_dict: dict, path: str) -> None:
    keys = [k["key"] for k in census_dict["keys"]]
    att = [k["attracting"] for k in census_dict["keys"]]
    rep = [k["repelling"] for k in census_dict["keys"]]
    und = [k["undecided"] for k in census_dict["keys"]]
    x = np.arange(len(keys))
    fig, ax = plt.subplots(figsize=(max(4, 0.8 * len(keys) + 2), 4))
    ax.bar(x - 0.25, att, 0.25, label="attracting")
    ax.bar(x, rep, 0.25, label="repelling")
    ax.bar(x + 0.25, und, 0.25, label="undecided")
    ax.set_xticks(x)
    ax.set_xticklabels(keys)
    ax.set_xlabel("rotation number p/q")
    ax.set_ylabel("orbits")
    ax.set_title(f"r = {census_dict['r']:g}, a = {census_dict['a']:g}, "
                 f"total attracting = {census_dict['total_attracting']}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_prevalence_figure(summary, path: str) -> None:
    values = [row.inequality_value for row in summary.rows]
    escaped = [row.inequality_value for row in summary.rows if row.escaped]
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = min(60, max(10, summary.trials // 25))
    ax.hist(values, bins=bins, alpha=0.6, label="all trials")
    if escaped:
        ax.hist(escaped, bins=bins, alpha=0.6, label="escaped")
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_xlabel("lhs - rhs")
    ax.set_ylabel("trials")
    ax.set_title(f"{summary.kind}: escape fraction {summary.fraction:.4f} "
                 f"[{summary.ci_low:.4f}, {summary.ci_high:.4f}]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_lemma_figure(report, r_values, counts, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(r_values, counts, drawstyle="steps-mid")
    ax.axhline(report.bound, color="r", ls="--", label=f"bound 2n = {report.bound}")
    ax.set_xlabel("r")
    ax.set_ylabel("real roots")
    ax.set_title(f"n = {report.n}, delta = {report.delta:g}, max = {report.max_roots}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_slope_figure(slope_report, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    a = np.asarray(slope_report.a_values)
    e = np.asarray(slope_report.errors)
    ax.loglog(a, np.maximum(e, 1e-300), "o-")
    label = "degenerate" if slope_report.degenerate else f"slope = {slope_report.slope:.3f}"
    ax.set_xlabel("a")
    ax.set_ylabel("max |flow - first order|")
    ax.set_title(label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

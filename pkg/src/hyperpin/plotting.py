"""Figure rendering for the CLI report paths (headless backend).

Each function takes computed data plus a target path and writes one PNG next
to the delimited output it illustrates.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_spectrum(path, eigenvalues, reduced=None, title="spectrum") -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ev = np.asarray(eigenvalues, dtype=complex)
    ax.scatter(ev.real, ev.imag, marker="x", label="open loop")
    if reduced is not None and len(reduced):
        rv = np.asarray(reduced, dtype=complex)
        ax.scatter(rv.real, rv.imag, marker="o", facecolors="none",
                   edgecolors="tab:red", label="reduced block")
    ax.axvline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_msf_grid(path, grid, eigenvalues=None, title="master stability function") -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    X, Y = np.meshgrid(grid.re, grid.im)
    pc = ax.pcolormesh(X, Y, grid.values, shading="auto", cmap="RdBu_r")
    fig.colorbar(pc, ax=ax, label="largest exponent")
    try:
        ax.contour(X, Y, grid.values, levels=[0.0], colors="k", linewidths=1.0)
    except ValueError:
        pass  # all-NaN or single-signed grids have no zero level
    if eigenvalues is not None and len(eigenvalues):
        ev = np.asarray(eigenvalues, dtype=complex)
        ax.scatter(ev.real, ev.imag, marker="x", color="white", s=30)
    ax.set_xlabel("Re mu")
    ax.set_ylabel("Im mu")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_trajectory(path, traj, component: int = 0, title="trajectories") -> None:
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    T, N, _ = traj.states.shape
    for i in range(N):
        ax0.plot(traj.times, traj.states[:, i, component], lw=0.7)
    ax0.plot(traj.times, traj.pinner[:, component], "k--", lw=1.6, label="pinner")
    ax0.set_ylabel(f"state[{component}]")
    ax0.legend(loc="best", fontsize=8)
    ax0.set_title(title)
    positive = traj.error_norm > 0
    ax1.semilogy(traj.times[positive], traj.error_norm[positive], lw=1.0)
    ax1.set_xlabel("t")
    ax1.set_ylabel("error norm")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cost_columns(path, ns, columns: dict[str, list], title="pinning cost") -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for label, vals in columns.items():
        ax.plot(ns, vals, marker="o", ms=3, label=label)
    ax.set_xlabel("N")
    ax.set_ylabel("selected pins")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_table2(path, rows, title="pinned percentage by density and order") -> None:
    """rows: (p, o, mean_scc, {method: pct})"""
    fig, ax = plt.subplots(figsize=(6.5, 4))
    labels = [f"p={p:g},o={o}" for p, o, _, _ in rows]
    methods = sorted({m for *_, d in rows for m in d})
    x = np.arange(len(rows))
    width = 0.8 / max(len(methods), 1)
    for j, m in enumerate(methods):
        vals = [d.get(m, np.nan) for *_, d in rows]
        ax.bar(x + j * width, vals, width, label=m)
    ax.set_xticks(x + 0.4 - width / 2)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("% of nodes pinned")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep(path, report, title="partition sweep") -> None:
    excesses = [r.greedy_cost - r.min_cost for r in report.rows if r.feasible]
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    if excesses:
        top = max(excesses)
        bins = np.arange(-0.5, top + 1.5)
        ax.hist(excesses, bins=bins, rwidth=0.8)
    ax.set_xlabel("greedy cost - minimum cost")
    ax.set_ylabel("feasible partitions")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_selection_trace(path, result, title="greedy score trace") -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    steps = [rec.step for rec in result.iterations]
    js = [rec.j_value for rec in result.iterations]
    ax.plot(steps, js, marker="o")
    ax.set_xlabel("iteration")
    ax.set_ylabel("chosen J")
    ax.set_title(f"{title} ({result.method}, cost {result.cost})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

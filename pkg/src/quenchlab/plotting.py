"""Matplotlib renderings of the experiment products, written next to the CSVs."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, outdir: str, name: str) -> str:
    path = os.path.join(outdir, f"{name}.png")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_quench(outdir: str, name: str, series) -> str:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    for q in sorted(series.pq, reverse=True):
        ax1.plot(series.grid.times, series.pq[q], label=f"Q={q:+d}")
    ax1.set_ylabel(r"$P_Q(t)$")
    ax1.legend(fontsize=8, ncol=2)
    ax2.plot(series.grid.times, series.entropy, color="k")
    ax2.set_xlabel("t")
    ax2.set_ylabel(r"$S_{L/2}(t)$ [nats]")
    return _save(fig, outdir, name)


def plot_ensemble(outdir: str, name: str, result) -> str:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    for q in sorted(result.mean_pq, reverse=True):
        if result.mean_pq[q].max() < 1e-6:
            continue
        ax1.plot(result.times, result.mean_pq[q], label=f"Q={q:+d}")
        ax1.fill_between(
            result.times,
            result.mean_pq[q] - result.se_pq[q],
            result.mean_pq[q] + result.se_pq[q],
            alpha=0.2,
        )
    ax1.set_ylabel(r"mean $P_Q(t)$")
    ax1.legend(fontsize=8, ncol=2)
    ax2.plot(result.times, result.mean_entropy, color="k")
    ax2.set_xlabel("t")
    ax2.set_ylabel(r"mean $S_{L/2}(t)$")
    return _save(fig, outdir, name)


def plot_spectrum(outdir: str, name: str, energies, entropies, weights,
                  highlight_threshold: float = 1e-3) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(energies, entropies, s=4, color="tab:blue", alpha=0.4)
    big = weights > highlight_threshold
    ax.scatter(energies[big], entropies[big], s=30, color="tab:red",
               label=f"weight > {highlight_threshold:g}")
    ax.set_xlabel("E")
    ax.set_ylabel(r"$S_{L/2}$ [nats]")
    ax.legend(fontsize=8)
    return _save(fig, outdir, name)


def plot_n_scaling(outdir: str, name: str, rows) -> str:
    fig, ax = plt.subplots(figsize=(5, 4))
    gammas = sorted({r["gamma"] for r in rows})
    for g in gammas:
        pts = [(r["L"], r["N"]) for r in rows if r["gamma"] == g]
        ax.plot(*zip(*pts), "o-", label=rf"$\gamma={g}$")
    ax.set_xlabel("L")
    ax.set_ylabel("N")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    return _save(fig, outdir, name)


def plot_training(outdir: str, name: str, history) -> str:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(np.arange(len(history)), history)
    ax.set_xlabel("iteration")
    ax.set_ylabel("P")
    ax.set_ylim(0, 1.02)
    return _save(fig, outdir, name)


def plot_bounds(outdir: str, name: str, report) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(report.times, report.exact, label=r"$\langle O\rangle(t)$", color="k")
    ax.plot(report.times, report.o_nonth, label=r"$O_{\rm in}(t)$", ls="--")
    ax.fill_between(report.times, report.truncated_low, report.truncated_high,
                    alpha=0.2, label=r"$\pm 2\Delta$ band")
    ax.set_xlabel("t")
    ax.set_ylabel("expectation value")
    ax.legend(fontsize=8)
    return _save(fig, outdir, name)

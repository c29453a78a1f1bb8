"""Figure rendering for run artifacts.

Every comparison run gets a four-panel overview PNG next to its CSV; witness
runs additionally get a distinguishability panel, and sweeps an aggregate
plot. Rendering is file-only (Agg backend), so runs work headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evolve import TimeSeries

_INFID_FLOOR = 1e-16


def render_run(art) -> dict:
    """Render the overview (and witness, if present) figures for one run."""
    out = art.out_dir
    ts = art.timeseries
    tau = art.summary["tau_n"]
    x = ts.t / tau
    files = {}

    fig, axes = plt.subplots(2, 2, figsize=(9, 6.5), sharex=True)
    ax = axes[0, 0]
    ax.plot(x, ts["n1"], label=r"$\langle a_1^\dagger a_1\rangle$")
    if "n2" in ts.channels:
        ax.plot(x, ts["n2"], label=r"$\langle a_2^\dagger a_2\rangle$")
    ax.plot(x, ts["sz"], label=r"$\langle\sigma_z\rangle$")
    ax.set_ylabel("mapped observables")
    ax.legend(fontsize=8)

    ax = axes[0, 1]
    ax.semilogy(x, np.clip(1.0 - ts["fid"], _INFID_FLOOR, None), color="crimson")
    ax.set_ylabel(r"$1 - F$")

    ax = axes[1, 0]
    ax.plot(x, ts["purity_total"], label="total")
    ax.plot(x, ts["purity_spin"], label="spin")
    ax.set_ylabel("purity")
    ax.set_xlabel(r"$t/\tau_n$")
    ax.legend(fontsize=8)

    ax = axes[1, 1]
    ax.plot(x, ts["entropy_spin"], color="darkgreen")
    ax.set_ylabel(r"$S_{vN}$ (bits)")
    ax.set_xlabel(r"$t/\tau_n$")

    name = art.config.get("name", "run")
    fig.suptitle(name)
    fig.tight_layout()
    path = out / "overview.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    files["overview_png"] = path

    if art.witness is not None:
        files["witness_png"] = _render_witness(out, art.witness, tau, art.summary)
    return files


def _render_witness(out: Path, w: TimeSeries, tau: float, summary: dict) -> Path:
    x = w.t / tau
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(x, w["tdist_target"], label="target frame")
    ax1.plot(x, w["tdist_mapped"], "--", label="mapped lab frame")
    ax1.set_ylabel(r"$\mathcal{D}(t)$")
    ax1.legend(fontsize=8)
    ax2.plot(x, w["sigma_target"] * tau, label="target frame")
    ax2.plot(x, w["sigma_mapped"] * tau, "--", label="mapped lab frame")
    thr = summary.get("witness_target_threshold")
    if thr is not None:
        ax2.axhline(thr * tau, color="gray", lw=0.8)
    ax2.axhline(0.0, color="k", lw=0.5)
    for a, b in summary.get("witness_target_intervals", []):
        ax2.axvspan(a, b, color="orange", alpha=0.25, lw=0)
    ax2.set_ylabel(r"$\sigma(t)\,\tau_n$")
    ax2.set_xlabel(r"$t/\tau_n$")
    fig.tight_layout()
    path = out / "witness.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_sweep(base: Path, paths, rows) -> Path | None:
    """Max infidelity against the first sweep axis, one curve per remaining point."""
    ok = [(ov, sm) for _, ov, sm, err in rows if sm is not None]
    if not ok:
        return None
    axis = paths[0]
    xs = np.array([ov[axis] for ov, _ in ok], dtype=float)
    ys = np.array([sm["max_infidelity"] for _, sm in ok])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    if np.all(xs > 0) and xs.max() / max(xs.min(), 1e-300) > 30:
        ax.set_xscale("log")
    if np.all(ys > 0):
        ax.set_yscale("log")
    ax.plot(xs, ys, "o-")
    ax.set_xlabel(axis)
    ax.set_ylabel("max 1 - F")
    fig.tight_layout()
    path = base / "aggregate.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

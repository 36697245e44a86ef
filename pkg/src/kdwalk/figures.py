"""Figure rendering for the report commands.

Each table-producing command can render a companion PNG next to its CSV.
Uses the Agg backend so the CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_RC = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def figure_path_for(out_path: str) -> str:
    stem = out_path.rsplit(".", 1)[0] if "." in out_path else out_path
    return stem + ".png"


def fig_sweep_t2(rows, argmax_t2: int, predicted_t2: int, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        t2s = [row.t2 for row in rows]
        ps = [row.p_max for row in rows]
        ax.plot(t2s, ps, marker=".", lw=1)
        ax.axvline(predicted_t2, color="tab:red", ls="--", lw=1,
                   label=f"predicted t2 = {predicted_t2}")
        ax.axvline(argmax_t2, color="tab:green", ls=":", lw=1,
                   label=f"sweep argmax = {argmax_t2}")
        ax.set_xlabel("walk steps per block t2")
        ax.set_ylabel("max success probability over t1")
        ax.legend()
        _save(fig, path)


def fig_sweep_t1(rows, argmax_t1: int, predicted_t1: int, t2: int, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot([row.t1 for row in rows], [row.p for row in rows], marker=".", lw=1)
        ax.axvline(predicted_t1, color="tab:red", ls="--", lw=1,
                   label=f"predicted t1 = {predicted_t1}")
        ax.axvline(argmax_t1, color="tab:green", ls=":", lw=1,
                   label=f"sweep argmax = {argmax_t1}")
        ax.set_xlabel("main-block repetitions t1")
        ax.set_ylabel(f"success probability at t2 = {t2}")
        ax.legend()
        _save(fig, path)


def fig_convergence(rows, constant: float, path) -> None:
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
        ns = [row.n for row in rows]
        ax1.semilogx(ns, [row.p_exact for row in rows], marker="o", label="exact")
        ax1.semilogx(ns, [row.p_asymptotic for row in rows], marker="s",
                     ls="--", label="asymptotic")
        ax1.set_xlabel("list length n")
        ax1.set_ylabel("success probability")
        ax1.legend()
        ax2.semilogx(ns, [row.scaled_gap for row in rows], marker="o",
                     label="scaled gap")
        ax2.axhline(constant, color="tab:red", ls="--", lw=1,
                    label=f"limit {constant:.4f}")
        ax2.set_xlabel("list length n")
        ax2.set_ylabel("(1 - p) * r^(1/k)")
        ax2.legend()
        _save(fig, path)


def fig_reduced_trajectory(ts, ps, fit, t1_mark: int, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(ts, ps, marker=".", lw=1, label="exact p(t)")
        if fit is not None:
            ax.plot(ts, fit, ls="--", lw=1, label="sinusoidal profile")
        ax.axvline(t1_mark, color="tab:red", ls=":", lw=1, label=f"t1 = {t1_mark}")
        ax.set_xlabel("main-block repetitions t")
        ax.set_ylabel("marked-class probability")
        ax.legend()
        _save(fig, path)


def fig_sample_histogram(probs: np.ndarray, exact_p: float, empirical: float, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(np.sort(probs)[::-1], lw=1)
        ax.set_xlabel("vertices by probability rank")
        ax.set_ylabel("measurement probability")
        ax.set_title(f"marked mass exact {exact_p:.5f}, empirical {empirical:.5f}")
        _save(fig, path)

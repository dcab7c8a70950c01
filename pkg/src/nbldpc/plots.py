"""Figures written next to the CSV outputs."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
    # fixed metadata keeps repeated runs byte-identical
    "svg.hashsalt": "nbldpc",
}


def _save(fig, path):
    meta = {"Software": None} if str(path).endswith(".png") else None
    fig.savefig(path, bbox_inches="tight", metadata=meta)
    plt.close(fig)


def plot_curves(curves, path, metrics=("ser", "wer")):
    """Error-rate curves from ``{label: [(ebn0_db, ErrorStats), ...]}``; zero rates are skipped."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        markers = "osd^v<>"
        for n, (label, results) in enumerate(curves.items()):
            for metric, ls in zip(metrics, ("-", "--", ":")):
                x = [e for e, st in results if getattr(st, metric) > 0]
                y = [getattr(st, metric) for e, st in results if getattr(st, metric) > 0]
                if x:
                    ax.semilogy(x, y, ls, marker=markers[n % len(markers)], ms=4,
                                label=f"{label} {metric.upper()}")
        ax.set_xlabel("$E_b/N_0$ (dB)")
        ax.set_ylabel("error rate")
        ax.legend()
        _save(fig, path)


def plot_scatter(c, initial_y, final_y, path):
    """Side-by-side received and corrected signal space."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(6.4, 3.2), sharex=True, sharey=True)
        lim = 1.35 * np.max(np.abs(c.points.real))
        for ax, y, title in ((axes[0], initial_y, "received"), (axes[1], final_y, "corrected")):
            y = np.ravel(y)
            ax.plot(y.real, y.imag, ".", ms=1, alpha=0.5)
            ax.plot(c.points.real, c.points.imag, "k+", ms=6)
            ax.set_title(title)
            ax.set_aspect("equal")
            ax.set_xlim(-lim, lim)
            ax.set_ylim(-lim, lim)
        _save(fig, path)

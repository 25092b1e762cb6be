"""Figure rendering for the report paths; PNGs land next to the TSV output."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_classification_figure(report, path) -> None:
    """Bar chart of the cross-validation grid with the test error overlaid."""
    cells = report.cells
    labels = [f"C={cell.C:g}\nt={cell.multiplier:g}m" for cell in cells]
    heights = [cell.cv_error for cell in cells]
    chosen = [
        cell.C == report.chosen_c and cell.multiplier == report.chosen_multiplier
        for cell in cells
    ]
    colors = ["#d65f5f" if hit else "#4878d0" for hit in chosen]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.7 * len(cells)), 3.6))
    ax.bar(range(len(cells)), heights, color=colors)
    ax.axhline(
        report.test_error,
        color="#333333",
        linestyle="--",
        linewidth=1.0,
        label=f"test error = {report.test_error:.3f}",
    )
    ax.set_xticks(range(len(cells)))
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylabel("CV error")
    ax.set_title(f"{report.kernel}: selection grid (chosen cell highlighted)")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_study_figure(rows, path) -> None:
    """Approximation gap and cost against the stopping tolerance."""
    taus = np.array([row.tau for row in rows])
    floor = 1e-17  # keep exact zeros visible on the log axis
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))

    ax1.loglog(taus, np.maximum([r.phi_gap_fro for r in rows], floor), "o-",
               label="Frobenius")
    ax1.loglog(taus, np.maximum([r.phi_gap_max for r in rows], floor), "s--",
               label="max")
    ax1.invert_xaxis()
    ax1.set_xlabel("stopping tolerance")
    ax1.set_ylabel("dissimilarity matrix gap")
    ax1.legend(fontsize=8)

    ax2.semilogx(taus, [r.mean_eval_seconds for r in rows], "o-", color="#4878d0")
    ax2.invert_xaxis()
    ax2.set_xlabel("stopping tolerance")
    ax2.set_ylabel("mean seconds per evaluation", color="#4878d0")
    twin = ax2.twinx()
    twin.semilogx(taus, [r.mean_rank2 for r in rows], "s--", color="#d65f5f")
    twin.set_ylabel("mean achieved rank", color="#d65f5f")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

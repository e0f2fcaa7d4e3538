"""Matplotlib rendering of sweep results to image files.

Uses the object-oriented Figure API directly (no pyplot, no global
backend state), so rendering works headless and never interferes with a
host application's matplotlib configuration.
"""

from __future__ import annotations

from matplotlib.figure import Figure

from .analysis import Frontier

__all__ = ["render_sweep_figure"]


def render_sweep_figure(path, frontier: Frontier, title: str | None = None) -> None:
    """Draw the (risk, gain) plane: sweep solutions, the winning rectangle,
    the ideal and reference points; save to path (format from extension)."""
    area_rows = [row for row in frontier.rows if row.method == "area"]
    if len(area_rows) != 1:
        raise ValueError("figure rendering needs exactly one area row")
    area_row = area_rows[0]
    ref = frontier.ref
    ideal = frontier.ideal

    fig = Figure(figsize=(7.0, 5.0))
    ax = fig.subplots()

    eps_rows = [row for row in frontier.rows if row.method != "area"]
    if eps_rows:
        eps_sorted = sorted(eps_rows, key=lambda row: row.risk)
        ax.plot(
            [row.risk for row in eps_sorted],
            [row.gain for row in eps_sorted],
            "o-",
            color="tab:blue",
            markersize=5,
            label="gain-floor sweep",
        )

    rect_x = [area_row.risk, ref.rho_ref, ref.rho_ref, area_row.risk, area_row.risk]
    rect_y = [area_row.gain, area_row.gain, ref.gamma_ref, ref.gamma_ref, area_row.gain]
    ax.plot(rect_x, rect_y, "--", color="tab:gray", linewidth=1.2, label="dominated rectangle")
    ax.fill(rect_x, rect_y, color="tab:gray", alpha=0.12)

    ax.plot([area_row.risk], [area_row.gain], "*", color="tab:red", markersize=14,
            label="area solution")
    ax.plot([ideal.rho_min], [ideal.gamma_max], "^", color="tab:green", markersize=9,
            label="ideal point")
    ax.plot([ref.rho_ref], [ref.gamma_ref], "v", color="black", markersize=9,
            label=f"reference ({ref.kind})")

    ax.set_xlabel("risk (%)")
    ax.set_ylabel("gain (%)")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.savefig(path, dpi=150, bbox_inches="tight")

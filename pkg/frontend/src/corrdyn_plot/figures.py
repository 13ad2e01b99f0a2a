"""Figure renderers for the corrdyn CSV outputs.

The plotting layer never recomputes physics: every renderer consumes the
documented CSV schema and draws it. Output is deterministic for fixed input
(vector formats carry no timestamps), so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

# green / blue / red per configuration, following the experimental figures
CONFIG_COLORS = ("#2ca02c", "#1f77b4", "#d62728")

FIGURE_SCHEMAS = {
    "fig4": {
        "variant",
        "t_over_tau",
        "analytic_ref",
        "pipeline_value",
        "std_err",
        "band_lo",
        "band_hi",
    },
    "fig6": {
        "pair",
        "distance",
        "analytic_ref",
        "pipeline_value",
        "std_err",
        "band_lo",
        "band_hi",
    },
    "fig7": {
        "config",
        "analytic_ref",
        "pipeline_value",
        "std_err",
        "band_lo",
        "band_hi",
    },
    "fig8": {"panel", "sigma_b", "sigma_l", "ibar"},
}


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    input_csv_paths: tuple[str, ...]
    output_path: str
    colors: tuple[str, ...] = CONFIG_COLORS

    def __post_init__(self):
        if self.figure_id not in FIGURE_SCHEMAS:
            raise ValueError(
                f"unknown figure {self.figure_id!r}; choose from {sorted(FIGURE_SCHEMAS)}"
            )
        object.__setattr__(self, "input_csv_paths", tuple(str(p) for p in self.input_csv_paths))


def _read_csv(path: str, figure_id: str) -> list[dict]:
    if not Path(path).exists():
        raise ValueError(f"input CSV does not exist: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        have = set(reader.fieldnames or ())
    missing = sorted(FIGURE_SCHEMAS[figure_id] - have)
    if missing:
        raise ValueError(f"{figure_id} CSV {path} is missing column '{missing[0]}'")
    return rows


def _floats(rows: list[dict], key: str) -> np.ndarray:
    return np.array([float(r[key]) if r[key] != "" else np.nan for r in rows])


def _configure_determinism() -> None:
    plt.rcParams["svg.hashsalt"] = "corrdyn"
    plt.rcParams["font.size"] = 11


def _save(fig, output_path: str) -> None:
    path = Path(output_path)
    metadata = {}
    suffix = path.suffix.lower()
    if suffix == ".svg":
        metadata = {"Date": None}
    elif suffix == ".pdf":
        metadata = {"CreationDate": None}
    fig.savefig(path, bbox_inches="tight", metadata=metadata)
    plt.close(fig)


def render_fig4(spec: FigureSpec):
    """Measure vs normalized time: analytic curves, pipeline points with
    error bars, and min-max simulation bands."""
    _configure_determinism()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for path, color in zip(spec.input_csv_paths, spec.colors):
        rows = _read_csv(path, "fig4")
        label = rows[0]["variant"] if rows else Path(path).stem
        t = _floats(rows, "t_over_tau")
        ax.plot(t, _floats(rows, "analytic_ref"), color=color, lw=1.6, label=f"{label} (analytic)")
        pipe = _floats(rows, "pipeline_value")
        if not np.all(np.isnan(pipe)):
            ax.errorbar(
                t,
                pipe,
                yerr=_floats(rows, "std_err"),
                color=color,
                fmt="o",
                ms=4,
                capsize=2,
                lw=1.0,
                label=f"{label} (pipeline)",
            )
            ax.fill_between(
                t, _floats(rows, "band_lo"), _floats(rows, "band_hi"), color=color, alpha=0.2, lw=0
            )
    ax.set_xlabel(r"waiting time $t/\tau$")
    ax.set_ylabel(r"correlation measure $\bar{I}$")
    ax.set_ylim(bottom=0)
    ax.legend(fontsize=8)
    _save(fig, spec.output_path)


def render_fig6(spec: FigureSpec):
    """Pairwise lower bounds vs qubit distance, with simulation bands."""
    _configure_determinism()
    rows = _read_csv(spec.input_csv_paths[0], "fig6")
    x = _floats(rows, "distance")
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.bar(
        x,
        _floats(rows, "band_hi") - _floats(rows, "band_lo"),
        bottom=_floats(rows, "band_lo"),
        width=0.6,
        color=spec.colors[0],
        alpha=0.25,
        label="simulation band",
    )
    ax.errorbar(
        x,
        _floats(rows, "pipeline_value"),
        yerr=_floats(rows, "std_err"),
        fmt="ko",
        capsize=3,
        label="pipeline",
    )
    ax.axhline(float(rows[0]["analytic_ref"]), color="gray", ls="--", lw=1, label="long-time limit")
    ax.set_xticks(x)
    ax.set_xticklabels([r["pair"] for r in rows])
    ax.set_xlabel("qubit pair (distance to qubit 1)")
    ax.set_ylabel(r"lower bound $\bar{I}_{LB}$")
    ax.set_ylim(bottom=0)
    ax.legend(fontsize=8)
    _save(fig, spec.output_path)


def render_fig7(spec: FigureSpec):
    """Four-body lower bounds for the encoding configurations."""
    _configure_determinism()
    rows = _read_csv(spec.input_csv_paths[0], "fig7")
    x = np.arange(len(rows), dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    for i, (row, color) in enumerate(zip(rows, spec.colors)):
        lo, hi = float(row["band_lo"]), float(row["band_hi"])
        ax.bar(i, hi - lo, bottom=lo, width=0.6, color=color, alpha=0.3)
        ax.errorbar(
            [i],
            [float(row["pipeline_value"])],
            yerr=[float(row["std_err"])],
            fmt="o",
            color=color,
            capsize=3,
        )
        ax.hlines(float(row["analytic_ref"]), i - 0.35, i + 0.35, color=color, ls="--", lw=1.2)
    ax.set_xticks(x)
    ax.set_xticklabels([r["config"] for r in rows])
    ax.set_xlabel("encoding configuration")
    ax.set_ylabel(r"lower bound $\bar{I}_{LB}$")
    ax.set_ylim(bottom=0)
    _save(fig, spec.output_path)


def render_fig8(spec: FigureSpec):
    """Measure surfaces over the two phase-noise widths, one panel per
    susceptibility configuration."""
    _configure_determinism()
    rows = _read_csv(spec.input_csv_paths[0], "fig8")
    panels = sorted({r["panel"] for r in rows})
    fig = plt.figure(figsize=(5.0 * len(panels), 4.2))
    for i, panel in enumerate(panels):
        sub = [r for r in rows if r["panel"] == panel]
        sb = np.array(sorted({float(r["sigma_b"]) for r in sub}))
        sl = np.array(sorted({float(r["sigma_l"]) for r in sub}))
        grid = np.full((len(sl), len(sb)), np.nan)
        bi = {v: k for k, v in enumerate(sb)}
        li = {v: k for k, v in enumerate(sl)}
        for r in sub:
            grid[li[float(r["sigma_l"])], bi[float(r["sigma_b"])]] = float(r["ibar"])
        ax = fig.add_subplot(1, len(panels), i + 1, projection="3d")
        mb, ml = np.meshgrid(sb, sl)
        ax.plot_surface(mb, ml, grid, cmap="viridis", linewidth=0, antialiased=False)
        ax.set_xlabel(r"$\sigma_B$")
        ax.set_ylabel(r"$\sigma_L$")
        ax.set_zlabel(r"$\bar{I}$")
        ax.set_title(panel)
    _save(fig, spec.output_path)


RENDERERS = {
    "fig4": render_fig4,
    "fig6": render_fig6,
    "fig7": render_fig7,
    "fig8": render_fig8,
}


def render_figure(spec: FigureSpec) -> str:
    """Render the figure described by ``spec``; returns the output path."""
    RENDERERS[spec.figure_id](spec)
    return spec.output_path

"""Figure builders for the four supported figure kinds.

Defaults (artifact choices): state heatmaps use the viridis colormap,
eigenfunction panels use RdBu_r with a symmetric color scale shared per
row, pivot overlays are black dots of size 4.  Rendering is deterministic:
the Agg backend, a fixed dpi and a fixed svg hash salt make repeated runs
byte-identical for identical inputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ksfigures"

import matplotlib.pyplot as plt
import numpy as np

from .figspec import FigureSpec
from .readers import (
    FigureInputError,
    load_eigenfunction_fields,
    read_eigenvalue_csv,
    read_heatmap_csv,
    read_pivots_csv,
)

DPI = 150
DECAY_INDEX_CAP = 20_000
INSET_COUNT = 20
PIVOT_DOT_SIZE = 4.0


def _imshow_field(ax, times, grid, values, cmap, vmin=None, vmax=None):
    return ax.imshow(
        values.T,
        origin="lower",
        aspect="auto",
        extent=(times[0], times[-1], grid[0], grid[-1]),
        cmap=cmap,
        vmin=vmin,
        vmax=vmax,
        interpolation="nearest",
    )


def build_heatmap_pivots(spec: FigureSpec):
    times, grid, values = read_heatmap_csv(spec.inputs["heatmap"])
    fig, ax = plt.subplots(figsize=(8, 4))
    im = _imshow_field(ax, times, grid, values, "viridis")
    if "pivots" in spec.inputs and spec.inputs["pivots"]:
        t, s = read_pivots_csv(spec.inputs["pivots"])
        if t.size:
            ax.scatter(t, s, s=PIVOT_DOT_SIZE, c="black", marker=".", linewidths=0)
    if "tmax" in spec.axis_limits:
        ax.set_xlim(times[0], min(float(spec.axis_limits["tmax"]), times[-1]))
    ax.set_xlabel("t")
    ax.set_ylabel("s")
    ax.set_title(spec.title or "state data")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    return fig


def build_eigenfunction_grid(spec: FigureSpec):
    methods = spec.inputs["methods"]
    indices = [int(i) for i in spec.inputs["indices"]]
    sidecar = spec.inputs["dataset_sidecar"]
    fields = {
        m["label"]: load_eigenfunction_fields(m["vectors"], sidecar, indices) for m in methods
    }
    labels = [m["label"] for m in methods]
    reference = labels[0]

    n_rows, n_cols = len(indices), len(labels)
    fig, axes = plt.subplots(
        n_rows, n_cols, figsize=(3.2 * n_cols, 2.6 * n_rows), squeeze=False
    )
    for row, idx in enumerate(indices):
        ref_field = fields[reference][row]
        # eigenvectors are sign-ambiguous: align every panel with the reference
        aligned = []
        for label in labels:
            f = fields[label][row]
            if np.sum(f * ref_field) < 0:
                f = -f
            aligned.append(f)
        scale = max(np.abs(f).max() for f in aligned)
        for col, (label, f) in enumerate(zip(labels, aligned)):
            ax = axes[row][col]
            n_time, n_space = f.shape
            _imshow_field(
                ax,
                np.arange(n_time, dtype=float),
                np.arange(n_space, dtype=float),
                f,
                "RdBu_r",
                vmin=-scale,
                vmax=scale,
            )
            if row == 0:
                ax.set_title(label)
            if col == 0:
                ax.set_ylabel(f"eigenfunction {idx}")
    fig.suptitle(spec.title or "")
    fig.tight_layout()
    return fig


def build_eigenvalue_decay(spec: FigureSpec):
    curves = [(c["label"], read_eigenvalue_csv(c["eigenvalues"])) for c in spec.inputs["curves"]]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    longest = max(lam.shape[0] for _, lam in curves)
    cap = min(longest, DECAY_INDEX_CAP)
    if "index_max" in spec.axis_limits:
        cap = min(cap, int(spec.axis_limits["index_max"]))
    for label, lam in curves:
        shown = lam[:cap]
        ax.semilogy(np.arange(shown.shape[0]), np.maximum(shown, 1e-300), label=label)
    ax.set_xlim(0, cap)
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue")
    ax.set_title(spec.title or "eigenvalue decay")
    ax.legend(loc="lower left")

    inset = ax.inset_axes([0.55, 0.55, 0.42, 0.4])
    for label, lam in curves:
        head = lam[: min(INSET_COUNT, lam.shape[0])]
        inset.plot(np.arange(head.shape[0]), head, marker=".", markersize=3)
    inset.set_title(f"leading {INSET_COUNT}", fontsize=8)
    inset.tick_params(labelsize=7)
    fig.tight_layout()
    return fig


def build_projection_triptych(spec: FigureSpec):
    panels = [(p["label"], read_heatmap_csv(p["heatmap"])) for p in spec.inputs["panels"]]
    vmin = min(values.min() for _, (_, _, values) in panels)
    vmax = max(values.max() for _, (_, _, values) in panels)
    n = len(panels)
    fig, axes = plt.subplots(1, n, figsize=(4.0 * n, 3.2), squeeze=False)
    im = None
    for ax, (label, (times, grid, values)) in zip(axes[0], panels):
        im = _imshow_field(ax, times, grid, values, "viridis", vmin=vmin, vmax=vmax)
        ax.set_title(label)
        ax.set_xlabel("t")
    axes[0][0].set_ylabel("s")
    if im is not None:
        fig.colorbar(im, ax=list(axes[0]), shrink=0.9)
    fig.suptitle(spec.title or "")
    return fig


_BUILDERS = {
    "heatmap+pivots": build_heatmap_pivots,
    "eigenfunction-grid": build_eigenfunction_grid,
    "eigenvalue-decay": build_eigenvalue_decay,
    "projection-triptych": build_projection_triptych,
}


def render(spec: FigureSpec) -> Path:
    """Build the figure described by ``spec`` and write it to ``spec.output``."""
    spec.validate()
    builder = _BUILDERS.get(spec.figure_kind)
    if builder is None:
        raise FigureInputError(f"unknown figure_kind '{spec.figure_kind}'")
    fig = builder(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata=_deterministic_metadata(out.suffix))
    plt.close(fig)
    return out


def _deterministic_metadata(suffix: str):
    if suffix.lower() == ".svg":
        return {"Date": None}  # drop the embedded timestamp
    if suffix.lower() == ".png":
        return {"Software": "ksfigures"}
    return None

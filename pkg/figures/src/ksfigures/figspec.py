"""Figure specifications loaded from JSON.

A spec names one of four figure kinds, the input files it reads and the
output image it writes:

heatmap+pivots
    inputs: heatmap (CSV), pivots (CSV, optional)
eigenfunction-grid
    inputs: dataset_sidecar (JSON), methods (ordered list of
    {label, vectors}), indices (eigenfunction indices, one grid row each)
eigenvalue-decay
    inputs: curves (ordered list of {label, eigenvalues CSV})
projection-triptych
    inputs: panels (ordered list of {label, heatmap CSV})

``axis_limits`` optionally bounds the time axis (heatmaps) or the index
axis (decay curves); the decay plot additionally enforces the hard index
cap of 20000.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .readers import FigureInputError

FIGURE_KINDS = (
    "heatmap+pivots",
    "eigenfunction-grid",
    "eigenvalue-decay",
    "projection-triptych",
)

_REQUIRED_INPUTS = {
    "heatmap+pivots": ("heatmap",),
    "eigenfunction-grid": ("dataset_sidecar", "methods", "indices"),
    "eigenvalue-decay": ("curves",),
    "projection-triptych": ("panels",),
}


@dataclass
class FigureSpec:
    figure_kind: str
    inputs: dict
    output: str
    axis_limits: dict = field(default_factory=dict)
    title: str = ""

    def validate(self) -> None:
        if self.figure_kind not in FIGURE_KINDS:
            raise FigureInputError(
                f"unknown figure_kind '{self.figure_kind}', expected one of {FIGURE_KINDS}"
            )
        for key in _REQUIRED_INPUTS[self.figure_kind]:
            if key not in self.inputs:
                raise FigureInputError(
                    f"{self.figure_kind} spec is missing inputs field '{key}'"
                )
        if not self.output:
            raise FigureInputError("spec is missing an output path")
        for entry_key, path_key in (("methods", "vectors"), ("curves", "eigenvalues"), ("panels", "heatmap")):
            for entry in self.inputs.get(entry_key, []):
                if "label" not in entry or path_key not in entry:
                    raise FigureInputError(
                        f"every '{entry_key}' entry needs 'label' and '{path_key}' fields"
                    )


def load_spec(path) -> FigureSpec:
    path = Path(path)
    if not path.exists():
        raise FigureInputError(f"missing spec file {path}")
    payload = json.loads(path.read_text())
    unknown = set(payload) - {"figure_kind", "inputs", "output", "axis_limits", "title"}
    if unknown:
        raise FigureInputError(f"{path}: unknown spec fields {sorted(unknown)}")
    try:
        spec = FigureSpec(**payload)
    except TypeError as exc:
        raise FigureInputError(f"{path}: {exc}") from exc
    spec.validate()
    return spec

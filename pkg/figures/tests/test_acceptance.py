"""Secondary acceptance: all seven study figures regenerate from persisted
pipeline outputs, with the eigenvalue-decay axis capped at 20000 and a
leading-20 inset.

The pipeline run is produced through the primary package's CLI, so this
suite exercises exactly the external file formats.
"""

import json
import shutil
import subprocess

import pytest

from ksfigures.cli import (
    main_eigenfunction_grid,
    main_eigenvalue_decay,
    main_heatmap_pivots,
    main_projection_triptych,
)
from ksfigures.figspec import load_spec
from ksfigures.render import DECAY_INDEX_CAP, build_eigenvalue_decay


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    if shutil.which("bkevd") is None:
        pytest.skip("bkevd CLI is not installed")
    out = tmp_path_factory.mktemp("pipeline") / "run"
    cmd = [
        "bkevd", "run",
        "--grid-size", "32",
        "--spinup-steps", "400",
        "--collect-every", "4",
        "--n-snapshots", "24",
        "--delays", "4",
        "--epsilon", "2.0",
        "--rank", "64",
        "--seed", "21",
        "--methods", "dilution,subsampling,dense",
        "--output-dir", str(out),
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out


def spec_file(tmp_path, name, payload):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(payload))
    return path


def test_all_seven_figures(run_dir, tmp_path):
    figs = tmp_path / "figs"
    figs.mkdir()
    methods = [
        {"label": "true", "vectors": str(run_dir / "evd_dense_vectors.bin")},
        {"label": "dilution", "vectors": str(run_dir / "evd_dilution_vectors.bin")},
        {"label": "subsampling", "vectors": str(run_dir / "evd_subsampling_vectors.bin")},
    ]
    specs = [
        ("heatmap+pivots", main_heatmap_pivots, {
            "figure_kind": "heatmap+pivots",
            "inputs": {
                "heatmap": str(run_dir / "dataset_heatmap.csv"),
                "pivots": str(run_dir / "pivots.csv"),
            },
            "output": str(figs / "fig1_samples.png"),
        }),
    ]
    for tag, (i, j) in (("a", (1, 2)), ("b", (4, 5)), ("c", (3, 6))):
        specs.append(("eigenfunction-grid", main_eigenfunction_grid, {
            "figure_kind": "eigenfunction-grid",
            "inputs": {
                "dataset_sidecar": str(run_dir / "dataset.json"),
                "methods": methods,
                "indices": [i, j],
            },
            "output": str(figs / f"fig_eigenfunctions_{tag}.png"),
        }))
    specs.append(("eigenvalue-decay", main_eigenvalue_decay, {
        "figure_kind": "eigenvalue-decay",
        "inputs": {
            "curves": [
                {"label": "true", "eigenvalues": str(run_dir / "evd_dense_eigenvalues.csv")},
                {"label": "dilution", "eigenvalues": str(run_dir / "evd_dilution_eigenvalues.csv")},
                {"label": "subsampling", "eigenvalues": str(run_dir / "evd_subsampling_eigenvalues.csv")},
            ]
        },
        "output": str(figs / "fig5_eigenvalues.png"),
    }))
    for tag, proj_methods in (("small", ("dilution", "subsampling")), ("alt", ("dense", "dilution"))):
        specs.append(("projection-triptych", main_projection_triptych, {
            "figure_kind": "projection-triptych",
            "inputs": {
                "panels": [
                    {"label": "true", "heatmap": str(run_dir / "dataset_heatmap.csv")},
                    *[
                        {"label": m, "heatmap": str(run_dir / f"projection_{m}_heatmap.csv")}
                        for m in proj_methods
                    ],
                ]
            },
            "output": str(figs / f"fig_projection_{tag}.png"),
        }))

    assert len(specs) == 7
    for kind, entry, payload in specs:
        path = spec_file(tmp_path, payload["output"].rsplit("/", 1)[-1], payload)
        assert entry(["--spec", str(path)]) == 0, kind
        out = figs / payload["output"].rsplit("/", 1)[-1]
        assert out.exists() and out.stat().st_size > 0, kind


def test_decay_honors_cap_and_inset_on_run_outputs(run_dir, tmp_path):
    payload = {
        "figure_kind": "eigenvalue-decay",
        "inputs": {
            "curves": [
                {"label": "dilution", "eigenvalues": str(run_dir / "evd_dilution_eigenvalues.csv")},
            ]
        },
        "output": str(tmp_path / "decay.png"),
    }
    spec = load_spec(spec_file(tmp_path, "decay", payload))
    fig = build_eigenvalue_decay(spec)
    ax = fig.axes[0]
    assert ax.get_xlim()[1] <= DECAY_INDEX_CAP
    assert len(ax.child_axes) == 1


def test_per_kind_cli_rejects_mismatched_spec(run_dir, tmp_path):
    payload = {
        "figure_kind": "heatmap+pivots",
        "inputs": {"heatmap": str(run_dir / "dataset_heatmap.csv")},
        "output": str(tmp_path / "x.png"),
    }
    path = spec_file(tmp_path, "mismatch", payload)
    assert main_eigenvalue_decay(["--spec", str(path)]) == 2

import numpy as np
import pytest

from bkevd.bistochastic import BistochasticEVD
from bkevd.errors import ConfigurationError
from bkevd.kernel import GaussianKernelConfig, delay_embed
from bkevd.ks import KSConfig
from bkevd.pipeline import (
    ExperimentConfig,
    dense_reference_evd,
    eigenvalue_report,
    project_states,
    run_experiment,
)
from bkevd import storage


def tiny_config(**kw):
    base = dict(
        ks=KSConfig(grid_size=32, spinup_steps=400, collect_every=4, n_snapshots=20),
        delays=4,
        epsilon=2.0,
        rank=64,
        seed=11,
        methods=("dilution", "subsampling", "dense"),
    )
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.fixture(scope="module")
def tiny_run():
    return run_experiment(tiny_config())


class TestRunExperiment:
    def test_reports_and_laws(self, tiny_run):
        assert set(tiny_run.reports) == {"dilution", "subsampling", "dense"}
        for name, evd in tiny_run.evds.items():
            assert evd.eigenvalues[0] == pytest.approx(1.0, abs=1e-8)
            assert np.all(evd.raw_eigenvalues >= -1e-8)
            assert np.all(evd.raw_eigenvalues <= 1.0 + 1e-8)
        for rep in tiny_run.reports.values():
            assert 0.0 <= rep.rel_l2_error <= 1.0

    def test_kernel_budget(self, tiny_run):
        n = tiny_run.embedded.n_states
        assert tiny_run.kernel_evaluations <= n * (tiny_run.config.rank + 1)

    def test_smoke_full_rank_matches_dense(self):
        # full-rank spans reproduce the dense projection to machine level
        ks = KSConfig(grid_size=32, spinup_steps=400, collect_every=4, n_snapshots=64)
        nm = (64 - 8 + 1) * 32
        cfg = ExperimentConfig(
            ks=ks,
            delays=8,
            epsilon=0.02,  # localized kernel keeps the full-rank factor well conditioned
            rank=nm,
            seed=3,
            methods=("dilution", "dense"),
        )
        result = run_experiment(cfg)
        dil = result.reports["dilution"].rel_l2_error
        den = result.reports["dense"].rel_l2_error
        assert abs(dil - den) <= 1e-8
        assert dil <= 1e-8

    def test_dense_cap_enforced(self):
        cfg = tiny_config(dense_cap=10)
        with pytest.raises(ConfigurationError, match="dense"):
            run_experiment(cfg)

    def test_validation_errors(self):
        with pytest.raises(ConfigurationError):
            run_experiment(tiny_config(rank=10**9))
        with pytest.raises(ConfigurationError):
            run_experiment(tiny_config(methods=("bogus",)))
        with pytest.raises(ConfigurationError):
            run_experiment(tiny_config(epsilon=-3.0))
        with pytest.raises(ConfigurationError):
            run_experiment(tiny_config(truncation=100000))

    def test_manifest_rerun_reproduces_csvs(self, tmp_path):
        cfg = tiny_config(methods=("dilution", "subsampling"), rank=32)
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        run_experiment(cfg, out1)
        manifest = storage.read_json(out1 / "manifest.json")
        cfg2 = ExperimentConfig.from_dict(manifest)
        run_experiment(cfg2, out2)
        for name in (
            "dataset_heatmap.csv",
            "pivots.csv",
            "errors.csv",
            "eigenvalue_summary.csv",
            "evd_dilution_eigenvalues.csv",
            "evd_subsampling_eigenvalues.csv",
            "projection_dilution_heatmap.csv",
            "projection_subsampling_heatmap.csv",
        ):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_artifacts_exist_and_load(self, tmp_path):
        cfg = tiny_config(methods=("dilution",), rank=24)
        out = tmp_path / "run"
        result = run_experiment(cfg, out)
        f, pivots, meta = storage.load_factor(out / "factor.bin")
        assert f.shape == (result.embedded.n_states, 24)
        assert np.array_equal(pivots, result.factor.pivots)
        lam = storage.read_eigenvalue_csv(out / "evd_dilution_eigenvalues.csv")
        assert np.array_equal(lam, result.evds["dilution"].eigenvalues)
        vecs, _ = storage.load_tall_matrix(out / "evd_dilution_vectors.bin")
        assert np.array_equal(vecs, result.evds["dilution"].eigenvectors)
        proj = storage.load_dataset(out / "projection_dilution.bin")
        assert proj.snapshots.shape == (result.embedded.n_time, 32)


class TestProjection:
    def test_full_basis_is_lossless(self, tiny_run):
        dense = tiny_run.evds["dense"]
        nm = tiny_run.embedded.n_states
        full = dense_reference_evd(tiny_run.embedded, GaussianKernelConfig(20.0, 4), nm)
        rep = project_states(full, tiny_run.dataset, 4)
        assert rep.rel_l2_error <= 1e-8

    def test_truncation_one_gives_mean_field(self, tiny_run):
        rep = project_states(tiny_run.evds["dilution"], tiny_run.dataset, 4, truncation=1)
        u = tiny_run.dataset.snapshots[3:].reshape(-1)
        expected = np.linalg.norm(u - u.mean()) / np.linalg.norm(u)
        assert rep.rel_l2_error == pytest.approx(expected, rel=1e-10)
        assert np.allclose(rep.projected_field.snapshots, u.mean(), atol=1e-10)

    def test_error_nonincreasing_in_truncation(self, tiny_run):
        evd = tiny_run.evds["dilution"]
        errors = [
            project_states(evd, tiny_run.dataset, 4, truncation=t).rel_l2_error
            for t in (1, 4, 16, 64)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(errors, errors[1:]))

    def test_shape_mismatch(self, tiny_run):
        with pytest.raises(ValueError, match="rows"):
            project_states(tiny_run.evds["dilution"], tiny_run.dataset, 5)


class TestEigenvalueReport:
    def test_threshold_indices(self, tmp_path):
        lam = np.array([1.0, 0.5, 0.25])
        evd = BistochasticEVD(np.eye(3), lam, lam.copy(), "demo")
        summary = eigenvalue_report({"demo": evd}, tmp_path)
        assert summary["demo"]["count"] == 3
        assert summary["demo"]["below"] == {"1e-01": None, "1e-02": None, "1e-03": None}
        assert (tmp_path / "evd_demo_eigenvalues.csv").exists()
        assert (tmp_path / "eigenvalue_summary.csv").exists()

    def test_threshold_crossings_found(self):
        lam = np.array([1.0, 0.05, 0.005, 0.0005])
        evd = BistochasticEVD(np.eye(4), lam, lam.copy(), "demo")
        summary = eigenvalue_report({"demo": evd})
        assert summary["demo"]["below"] == {"1e-01": 1, "1e-02": 2, "1e-03": 3}

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            eigenvalue_report({})


def test_dense_vs_dilution_leading_eigenvalues():
    # moderate-rank factorization reproduces the leading dense spectrum
    ks = KSConfig(grid_size=20, spinup_steps=400, collect_every=4, n_snapshots=29)
    cfg = ExperimentConfig(
        ks=ks, delays=5, epsilon=0.5, rank=250, seed=7, methods=("dilution", "dense")
    )
    result = run_experiment(cfg)
    assert result.embedded.n_states == 500
    dil = result.evds["dilution"].eigenvalues[:10]
    den = result.evds["dense"].eigenvalues[:10]
    assert np.max(np.abs(dil - den) / den) < 1e-3

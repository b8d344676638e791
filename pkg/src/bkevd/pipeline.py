"""End-to-end experiment orchestration.

A run chains: KS dataset generation -> delay embedding -> (optional)
bandwidth calibration -> randomly pivoted Cholesky factorization -> the
requested eigendecomposition methods -> projection diagnostics -> file
artifacts (eigenvalue CSVs, binary eigenvector blocks, projected fields,
heatmap grids and a manifest capturing every parameter).

Re-running with a persisted manifest reproduces all CSV outputs
bit-exactly: pivot sampling is inverse-CDF on a PCG64 stream, the
integrator and decompositions are deterministic, and CSV floats are written
with round-trip precision.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bistochastic import (
    BistochasticEVD,
    dense_bistochastic,
    dilution_evd,
    subsample_evd,
)
from .errors import ConfigurationError
from .kernel import (
    CountingOracle,
    DelayEmbeddedProductStates,
    GaussianKernelConfig,
    GaussianKernelOracle,
    default_epsilon_grid,
    delay_embed,
    gaussian_gram,
    median_bandwidth,
    scaling_refine_bandwidth,
)
from .ks import KSConfig, SpatiotemporalDataset, etdrk4_integrate
from .linalg import sym_evd
from .rpcholesky import PartialCholeskyFactor, rpcholesky
from . import storage

__all__ = [
    "CalibrationSettings",
    "ExperimentConfig",
    "ProjectionReport",
    "ExperimentResult",
    "derived_rngs",
    "calibrate_bandwidth",
    "dense_reference_evd",
    "project_states",
    "eigenvalue_report",
    "run_experiment",
]

log = logging.getLogger("bkevd")

KNOWN_METHODS = ("dilution", "subsampling", "dense")
DECAY_THRESHOLDS = (1e-1, 1e-2, 1e-3)


@dataclass
class CalibrationSettings:
    """Two-stage bandwidth calibration knobs."""

    subsample: int = 2048
    refine_size: int = 8192
    grid_points: int = 64
    grid_span: float = 1e3


@dataclass
class ExperimentConfig:
    ks: KSConfig = field(default_factory=KSConfig)
    delays: int = 64
    # Bandwidth in the exp(-d^2/(eps Q)) normalization, or "auto" to
    # calibrate.  The default is the bundled study preset: with Q = 64 the
    # kernel exponent is -d^2/50.
    epsilon: float | str = 50.0 / 64.0
    rank: int = 2048
    seed: int = 0
    methods: tuple[str, ...] = ("dilution", "subsampling")
    truncation: int | None = None  # eigenfunctions used in projection; None = all
    dense_cap: int = 8000
    calibration: CalibrationSettings = field(default_factory=CalibrationSettings)
    output_dir: str | None = None  # default artifact directory; run() may override

    def validate(self) -> None:
        self.ks.validate()
        if self.delays < 1:
            raise ConfigurationError("delays must be at least 1")
        if self.ks.n_snapshots < self.delays:
            raise ConfigurationError("delays exceed the snapshot count")
        nm = (self.ks.n_snapshots - self.delays + 1) * self.ks.grid_size
        if not 1 <= self.rank <= nm:
            raise ConfigurationError(f"rank must be in [1, {nm}]")
        if self.truncation is not None and not 1 <= self.truncation <= self.rank:
            raise ConfigurationError("truncation must be in [1, rank]")
        bad = [m for m in self.methods if m not in KNOWN_METHODS]
        if bad or not self.methods:
            raise ConfigurationError(f"methods must be a nonempty subset of {KNOWN_METHODS}")
        if "dense" in self.methods and nm > self.dense_cap:
            raise ConfigurationError(
                f"dense method needs NM <= {self.dense_cap}, got {nm}; raise dense_cap explicitly"
            )
        if self.epsilon != "auto":
            if not isinstance(self.epsilon, (int, float)) or self.epsilon <= 0:
                raise ConfigurationError('epsilon must be positive or "auto"')

    def to_dict(self) -> dict:
        out = asdict(self)
        out["methods"] = list(self.methods)
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        payload = dict(payload)
        if "config" in payload:  # accept a full manifest
            payload = dict(payload["config"])
        if "ks" in payload:
            payload["ks"] = KSConfig(**payload["ks"])
        if "calibration" in payload:
            payload["calibration"] = CalibrationSettings(**payload["calibration"])
        if "methods" in payload:
            payload["methods"] = tuple(payload["methods"])
        return cls(**payload)


@dataclass
class ProjectionReport:
    """Relative 2-norm reconstruction error of training data in an eigenbasis."""

    method: str
    rel_l2_error: float
    truncation: int
    projected_field: SpatiotemporalDataset


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    dataset: SpatiotemporalDataset
    embedded: DelayEmbeddedProductStates
    epsilon: float
    epsilon_stage1: float | None
    factor: PartialCholeskyFactor
    evds: dict[str, BistochasticEVD]
    reports: dict[str, ProjectionReport]
    kernel_evaluations: int
    manifest: dict


def derived_rngs(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Deterministic (pivot-sampling, calibration) generators from one seed."""
    children = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(children[0]), np.random.default_rng(children[1])


def calibrate_bandwidth(
    embedded: DelayEmbeddedProductStates,
    settings: CalibrationSettings,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Two-stage bandwidth calibration; returns (median stage, refined stage).

    Stage one applies the median rule on a uniform subsample.  Stage two
    selects an informed subset by running the pivoted Cholesky sampler on
    the stage-one kernel, then maximizes the log-log kernel-sum slope over a
    log-spaced grid around the stage-one value.
    """
    eps0 = median_bandwidth(embedded, settings.subsample, rng)
    n_refine = min(settings.refine_size, embedded.n_states)
    oracle = GaussianKernelOracle(embedded.vectors, GaussianKernelConfig(eps0, embedded.delays))
    picked = rpcholesky(oracle, n_refine, rng).pivots
    subset = DelayEmbeddedProductStates(
        embedded.vectors[picked],
        n_time=1,
        n_space=len(picked),
        delays=embedded.delays,
        sample_dt=embedded.sample_dt,
    )
    grid = default_epsilon_grid(eps0, settings.grid_points, settings.grid_span)
    return eps0, scaling_refine_bandwidth(subset, grid)


def dense_reference_evd(
    embedded: DelayEmbeddedProductStates, cfg: GaussianKernelConfig, rank: int
) -> BistochasticEVD:
    """Direct EVD of the full bistochastic kernel matrix, leading ``rank`` pairs.

    O(NM^2) memory and O(NM^3) work; guarded by ``dense_cap`` in pipelines.
    """
    k = gaussian_gram(embedded.vectors, cfg)
    phi, lam = sym_evd(dense_bistochastic(k))
    rank = min(rank, lam.shape[0])
    raw = lam[:rank].copy()
    vecs = phi[:, :rank].copy()
    flip = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(rank)] < 0
    vecs[:, flip] *= -1.0
    return BistochasticEVD(vecs, np.clip(raw, 0.0, 1.0), raw, "dense")


def project_states(
    evd: BistochasticEVD,
    data: SpatiotemporalDataset,
    delays: int,
    truncation: int | None = None,
) -> ProjectionReport:
    """Project the usable training snapshots onto leading eigenfunctions.

    The usable snapshots are those aligned with the delay-embedded product
    states (source indices ``delays - 1`` onward); they are flattened into
    one vector, projected onto the first ``truncation`` eigenvector columns,
    and compared in the relative 2-norm.
    """
    n_time = data.n_snapshots - delays + 1
    m = data.grid_size
    phi = evd.eigenvectors
    if phi.shape[0] != n_time * m:
        raise ValueError(
            f"eigenvector rows ({phi.shape[0]}) do not match product states ({n_time * m})"
        )
    cols = phi.shape[1] if truncation is None else truncation
    if not 1 <= cols <= phi.shape[1]:
        raise ValueError(f"truncation must be in [1, {phi.shape[1]}]")

    u = np.ascontiguousarray(data.snapshots[delays - 1 :]).reshape(-1)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise ValueError("training data is identically zero")
    basis = phi[:, :cols]
    u_hat = basis @ (basis.T @ u)
    rel = float(np.linalg.norm(u - u_hat) / norm)
    projected = SpatiotemporalDataset(u_hat.reshape(n_time, m), data.grid, data.sample_dt)
    return ProjectionReport(evd.method, rel, cols, projected)


def _decay_indices(lam: np.ndarray) -> dict[str, int | None]:
    out: dict[str, int | None] = {}
    for thr in DECAY_THRESHOLDS:
        below = np.nonzero(lam < thr)[0]
        out[f"{thr:.0e}"] = int(below[0]) if below.size else None
    return out


def eigenvalue_report(evds: dict[str, BistochasticEVD], output_dir=None) -> dict:
    """Eigenvalue tables plus tail-decay diagnostics per method.

    Returns ``{method: {"count": n, "below": {"1e-01": idx or None, ...}}}``
    and, when ``output_dir`` is given, writes ``evd_<method>_eigenvalues.csv``
    per method and one ``eigenvalue_summary.csv``.
    """
    if not evds:
        raise ValueError("need at least one method result")
    summary = {
        name: {"count": int(evd.eigenvalues.shape[0]), "below": _decay_indices(evd.eigenvalues)}
        for name, evd in evds.items()
    }
    if output_dir is not None:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        for name, evd in evds.items():
            storage.write_eigenvalue_csv(output_dir / f"evd_{name}_eigenvalues.csv", evd.eigenvalues)
        with open(output_dir / "eigenvalue_summary.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["method", "count"] + [f"first_below_{thr:.0e}" for thr in DECAY_THRESHOLDS]
            writer.writerow(header)
            for name, info in summary.items():
                row = [name, info["count"]]
                row += ["" if v is None else v for v in info["below"].values()]
                writer.writerow(row)
    return summary


def run_experiment(cfg: ExperimentConfig, output_dir=None) -> ExperimentResult:
    """Execute the full pipeline described by ``cfg``.

    Returns all in-memory results; when ``output_dir`` is given, also
    persists datasets, the factor, eigenvector blocks, eigenvalue CSVs,
    projected fields, error tables and a ``manifest.json`` sufficient to
    reproduce the run.
    """
    cfg.validate()
    if output_dir is None:
        output_dir = cfg.output_dir
    rpc_rng, calib_rng = derived_rngs(cfg.seed)

    log.info("integrating KS dataset (%d snapshots)", cfg.ks.n_snapshots)
    dataset = etdrk4_integrate(cfg.ks)
    embedded = delay_embed(dataset, cfg.delays)
    log.info("embedded %d product states of dimension %d", embedded.n_states, cfg.delays)

    eps_stage1 = None
    if cfg.epsilon == "auto":
        eps_stage1, epsilon = calibrate_bandwidth(embedded, cfg.calibration, calib_rng)
        log.info("calibrated bandwidth: stage1=%.6g refined=%.6g", eps_stage1, epsilon)
    else:
        epsilon = float(cfg.epsilon)
    kcfg = GaussianKernelConfig(epsilon, cfg.delays)

    oracle = CountingOracle(GaussianKernelOracle(embedded.vectors, kcfg))
    factor = rpcholesky(oracle, cfg.rank, rpc_rng)
    log.info(
        "rpcholesky rank=%d rel_trace_error=%.6g evaluations=%d",
        factor.rank,
        factor.rel_trace_error,
        oracle.entry_evaluations,
    )

    evds: dict[str, BistochasticEVD] = {}
    for method in cfg.methods:
        if method == "dilution":
            evds[method] = dilution_evd(factor)
        elif method == "subsampling":
            evds[method] = subsample_evd(embedded, kcfg, factor.pivots)
        else:
            evds[method] = dense_reference_evd(embedded, kcfg, cfg.rank)
        log.info("%s EVD done (%d eigenpairs)", method, evds[method].eigenvalues.shape[0])

    reports = {
        name: project_states(evd, dataset, cfg.delays, cfg.truncation)
        for name, evd in evds.items()
    }
    for name, rep in reports.items():
        log.info("%s projection error %.6g (truncation %d)", name, rep.rel_l2_error, rep.truncation)

    manifest = {
        "config": cfg.to_dict(),
        "derived": {
            "n_time": embedded.n_time,
            "n_states": embedded.n_states,
            "epsilon": epsilon,
            "epsilon_stage1": eps_stage1,
            "rel_trace_error": factor.rel_trace_error,
            "factor_rank": factor.rank,
            "truncated": factor.truncated,
            "kernel_evaluations": oracle.entry_evaluations,
            "projection_errors": {n: r.rel_l2_error for n, r in reports.items()},
        },
        "artifacts": {},
    }

    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        arts = manifest["artifacts"]

        storage.save_dataset(out / "dataset.bin", dataset, {"ks": asdict(cfg.ks)})
        storage.write_heatmap_csv(out / "dataset_heatmap.csv", dataset)
        arts["dataset"] = "dataset.bin"
        arts["dataset_heatmap"] = "dataset_heatmap.csv"

        storage.save_factor(
            out / "factor.bin",
            factor,
            {"seed": cfg.seed, "epsilon": epsilon, "delays": cfg.delays},
        )
        storage.write_pivots_csv(
            out / "pivots.csv", factor.pivots, embedded.n_space, dataset.sample_dt, dataset.grid
        )
        arts["factor"] = "factor.bin"
        arts["pivots"] = "pivots.csv"

        eigenvalue_report(evds, out)
        arts["eigenvalue_summary"] = "eigenvalue_summary.csv"
        for name, evd in evds.items():
            vec_path = out / f"evd_{name}_vectors.bin"
            storage.save_tall_matrix(
                vec_path,
                evd.eigenvectors,
                np.arange(evd.eigenvectors.shape[1]),
                {
                    "kind": "eigenvector_block",
                    "method": name,
                    "rank": int(evd.eigenvectors.shape[1]),
                    "seed": cfg.seed,
                    "epsilon": epsilon,
                    "delays": cfg.delays,
                },
            )
            arts[f"evd_{name}_eigenvalues"] = f"evd_{name}_eigenvalues.csv"
            arts[f"evd_{name}_vectors"] = f"evd_{name}_vectors.bin"

        with open(out / "errors.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "rel_l2_error", "truncation"])
            for name, rep in reports.items():
                writer.writerow([name, storage.fmt(rep.rel_l2_error), rep.truncation])
        arts["errors"] = "errors.csv"

        for name, rep in reports.items():
            storage.save_dataset(
                out / f"projection_{name}.bin",
                rep.projected_field,
                {"method": name, "rel_l2_error": rep.rel_l2_error},
            )
            storage.write_heatmap_csv(out / f"projection_{name}_heatmap.csv", rep.projected_field)
            arts[f"projection_{name}"] = f"projection_{name}.bin"
            arts[f"projection_{name}_heatmap"] = f"projection_{name}_heatmap.csv"

        storage.write_json(out / "manifest.json", manifest)

    return ExperimentResult(
        config=cfg,
        dataset=dataset,
        embedded=embedded,
        epsilon=epsilon,
        epsilon_stage1=eps_stage1,
        factor=factor,
        evds=evds,
        reports=reports,
        kernel_evaluations=oracle.entry_evaluations,
        manifest=manifest,
    )

"""Command line interface.

Subcommands mirror the pipeline stages: ``simulate`` (KS dataset),
``calibrate`` (bandwidth), ``factorize`` (pivoted partial Cholesky),
``evd`` (one decomposition method), ``project``, ``run`` (full pipeline)
and ``report`` (regenerate CSV tables from persisted artifacts).

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import storage
from .bistochastic import BistochasticEVD, dilution_evd, subsample_evd
from .errors import ConfigurationError, NumericalError
from .kernel import GaussianKernelConfig, GaussianKernelOracle, delay_embed
from .ks import KSConfig, etdrk4_integrate
from .pipeline import (
    CalibrationSettings,
    ExperimentConfig,
    calibrate_bandwidth,
    derived_rngs,
    eigenvalue_report,
    project_states,
    run_experiment,
)
from .rpcholesky import PartialCholeskyFactor, rpcholesky

log = logging.getLogger("bkevd")


def _add_ks_flags(p: argparse.ArgumentParser) -> None:
    d = KSConfig()
    p.add_argument("--domain-length", type=float, default=d.domain_length)
    p.add_argument("--grid-size", type=int, default=d.grid_size)
    p.add_argument("--dt", type=float, default=d.dt)
    p.add_argument("--spinup-steps", type=int, default=d.spinup_steps)
    p.add_argument("--collect-every", type=int, default=d.collect_every)
    p.add_argument("--n-snapshots", type=int, default=d.n_snapshots)
    p.add_argument("--init-coeff", type=float, default=d.init_coeff)


def _ks_from_args(args) -> KSConfig:
    return KSConfig(
        domain_length=args.domain_length,
        grid_size=args.grid_size,
        dt=args.dt,
        spinup_steps=args.spinup_steps,
        collect_every=args.collect_every,
        n_snapshots=args.n_snapshots,
        init_coeff=args.init_coeff,
    )


def _load_embedded(dataset_path, delays):
    data = storage.load_dataset(dataset_path)
    return data, delay_embed(data, delays)


def cmd_simulate(args) -> int:
    data = etdrk4_integrate(_ks_from_args(args))
    storage.save_dataset(args.out, data, {"ks": asdict(_ks_from_args(args))})
    if args.heatmap_csv:
        storage.write_heatmap_csv(args.heatmap_csv, data)
    print(f"wrote {data.n_snapshots} snapshots of {data.grid_size} points to {args.out}")
    return 0


def cmd_calibrate(args) -> int:
    _, embedded = _load_embedded(args.dataset, args.delays)
    settings = CalibrationSettings(
        subsample=args.subsample,
        refine_size=args.refine_size,
        grid_points=args.grid_points,
        grid_span=args.grid_span,
    )
    _, calib_rng = derived_rngs(args.seed)
    eps0, eps = calibrate_bandwidth(embedded, settings, calib_rng)
    print(f"median-rule bandwidth: {eps0:.6g}")
    print(f"refined bandwidth:     {eps:.6g}")
    return 0


def cmd_factorize(args) -> int:
    _, embedded = _load_embedded(args.dataset, args.delays)
    oracle = GaussianKernelOracle(embedded.vectors, GaussianKernelConfig(args.epsilon, args.delays))
    rpc_rng, _ = derived_rngs(args.seed)
    factor = rpcholesky(oracle, args.rank, rpc_rng)
    storage.save_factor(
        args.out, factor, {"seed": args.seed, "epsilon": args.epsilon, "delays": args.delays}
    )
    print(f"rank {factor.rank} factor, relative trace error {factor.rel_trace_error:.6g}")
    return 0


def _evd_to_files(evd: BistochasticEVD, prefix: Path, meta: dict) -> None:
    storage.write_eigenvalue_csv(f"{prefix}_eigenvalues.csv", evd.eigenvalues)
    storage.save_tall_matrix(
        f"{prefix}_vectors.bin",
        evd.eigenvectors,
        np.arange(evd.eigenvectors.shape[1]),
        {"kind": "eigenvector_block", "method": evd.method, **meta},
    )


def cmd_evd(args) -> int:
    f, pivots, meta = storage.load_factor(args.factor)
    factor = PartialCholeskyFactor(
        factor=f,
        pivots=pivots,
        residual_diag=np.zeros(f.shape[0]),
        rel_trace_error=float(meta.get("rel_trace_error", 0.0)),
    )
    epsilon = args.epsilon if args.epsilon is not None else meta.get("epsilon")
    delays = args.delays if args.delays is not None else meta.get("delays")
    if args.method == "dilution":
        evd = dilution_evd(factor)
    else:
        if args.dataset is None:
            raise ConfigurationError("subsampling needs --dataset to re-evaluate the kernel")
        if epsilon is None or delays is None:
            raise ConfigurationError("subsampling needs --epsilon and --delays (or factor sidecar)")
        _, embedded = _load_embedded(args.dataset, int(delays))
        evd = subsample_evd(embedded, GaussianKernelConfig(float(epsilon), int(delays)), pivots)
    _evd_to_files(evd, Path(args.out_prefix), {"epsilon": epsilon, "delays": delays})
    print(f"{args.method}: {evd.eigenvalues.shape[0]} eigenpairs, leading {evd.eigenvalues[0]:.8f}")
    return 0


def cmd_project(args) -> int:
    data = storage.load_dataset(args.dataset)
    vectors, _ = storage.load_tall_matrix(args.vectors)
    meta_path = Path(args.vectors).with_suffix(".json")
    meta = storage.read_json(meta_path) if meta_path.exists() else {}
    evd = BistochasticEVD(
        eigenvectors=vectors,
        eigenvalues=np.ones(vectors.shape[1]),
        raw_eigenvalues=np.ones(vectors.shape[1]),
        method=str(meta.get("method", "unknown")),
    )
    report = project_states(evd, data, args.delays, args.truncation)
    storage.save_dataset(
        f"{args.out_prefix}.bin",
        report.projected_field,
        {"method": report.method, "rel_l2_error": report.rel_l2_error},
    )
    storage.write_heatmap_csv(f"{args.out_prefix}_heatmap.csv", report.projected_field)
    print(f"relative projection error: {report.rel_l2_error:.6g}")
    return 0


def cmd_run(args) -> int:
    if args.config:
        cfg = ExperimentConfig.from_dict(storage.read_json(args.config))
        if args.seed is not None:
            cfg.seed = args.seed
    else:
        if args.seed is None:
            raise ConfigurationError("--seed is required (reproducibility) when no config is given")
        epsilon = "auto" if args.epsilon == "auto" else float(args.epsilon)
        cfg = ExperimentConfig(
            ks=_ks_from_args(args),
            delays=args.delays,
            epsilon=epsilon,
            rank=args.rank,
            seed=args.seed,
            methods=tuple(args.methods.split(",")),
            truncation=args.truncation,
            dense_cap=args.dense_cap,
        )
    result = run_experiment(cfg, args.output_dir)
    print(f"epsilon: {result.epsilon:.6g}")
    print(f"relative trace error: {result.factor.rel_trace_error:.6g}")
    for name, rep in result.reports.items():
        print(f"{name} projection error: {rep.rel_l2_error:.6g}")
    return 0


def cmd_report(args) -> int:
    out = Path(args.output_dir)
    manifest = storage.read_json(out / "manifest.json")
    evds: dict[str, BistochasticEVD] = {}
    for name in manifest["config"]["methods"]:
        vectors, _ = storage.load_tall_matrix(out / f"evd_{name}_vectors.bin")
        lam = storage.read_eigenvalue_csv(out / f"evd_{name}_eigenvalues.csv")
        evds[name] = BistochasticEVD(vectors, lam, lam.copy(), name)
    summary = eigenvalue_report(evds, out)
    data = storage.load_dataset(out / "dataset.bin")
    storage.write_heatmap_csv(out / "dataset_heatmap.csv", data)
    for name in manifest["config"]["methods"]:
        proj = storage.load_dataset(out / f"projection_{name}.bin")
        storage.write_heatmap_csv(out / f"projection_{name}_heatmap.csv", proj)
    for name, info in summary.items():
        print(f"{name}: {info['count']} eigenvalues, tail crossings {info['below']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bkevd",
        description="Low-rank eigendecompositions of bistochastic kernel matrices",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log pipeline stages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the KS equation and store snapshots")
    _add_ks_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--heatmap-csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="two-stage kernel bandwidth calibration")
    p.add_argument("--dataset", required=True)
    p.add_argument("--delays", type=int, required=True)
    p.add_argument("--subsample", type=int, default=2048)
    p.add_argument("--refine-size", type=int, default=8192)
    p.add_argument("--grid-points", type=int, default=64)
    p.add_argument("--grid-span", type=float, default=1e3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("factorize", help="randomly pivoted partial Cholesky factorization")
    p.add_argument("--dataset", required=True)
    p.add_argument("--delays", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("evd", help="eigendecomposition from a stored factor")
    p.add_argument("--factor", required=True)
    p.add_argument("--method", choices=["dilution", "subsampling"], required=True)
    p.add_argument("--dataset", help="required for subsampling")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delays", type=int)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_evd)

    p = sub.add_parser("project", help="project training data onto stored eigenvectors")
    p.add_argument("--vectors", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--delays", type=int, required=True)
    p.add_argument("--truncation", type=int)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("run", help="full pipeline")
    _add_ks_flags(p)
    p.add_argument("--config", help="JSON experiment config or manifest")
    p.add_argument("--delays", type=int, default=64)
    p.add_argument("--epsilon", default="0.78125", help='bandwidth value or "auto"')
    p.add_argument("--rank", type=int, default=2048)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--methods", default="dilution,subsampling")
    p.add_argument("--truncation", type=int)
    p.add_argument("--dense-cap", type=int, default=8000)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="regenerate CSV tables from persisted artifacts")
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Thin command line wrappers: one generic entry point plus one per kind.

Every command takes ``--spec figure.json``; the per-kind commands refuse a
spec whose ``figure_kind`` does not match, which keeps batch scripts
self-checking.
"""

from __future__ import annotations

import argparse
import sys

from .figspec import load_spec
from .readers import FigureInputError
from .render import render


def _run(expected_kind: str | None, argv=None) -> int:
    parser = argparse.ArgumentParser(description="render one figure from a JSON spec")
    parser.add_argument("--spec", required=True, help="figure spec JSON file")
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.spec)
        if expected_kind is not None and spec.figure_kind != expected_kind:
            raise FigureInputError(
                f"spec is of kind '{spec.figure_kind}', this command renders '{expected_kind}'"
            )
        out = render(spec)
    except FigureInputError as exc:
        print(f"figure input error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    return _run(None, argv)


def main_heatmap_pivots(argv=None) -> int:
    return _run("heatmap+pivots", argv)


def main_eigenfunction_grid(argv=None) -> int:
    return _run("eigenfunction-grid", argv)


def main_eigenvalue_decay(argv=None) -> int:
    return _run("eigenvalue-decay", argv)


def main_projection_triptych(argv=None) -> int:
    return _run("projection-triptych", argv)


if __name__ == "__main__":
    sys.exit(main())

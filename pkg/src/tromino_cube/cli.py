"""``tromino-cube`` command line: solve, verify, sweep, classify2d."""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from . import gadgets
from .documents import (
    DocumentError,
    InstanceDocument,
    TilingDocument,
    dumps,
    loads,
    render_layers,
    render_mtl,
    render_obj,
)
from .geometry import Instance, InstanceError, canonicalize, required_deficiencies
from .solver import SolverDefect, solve
from .storage import CACHE_ENV, DiskWitnessStore
from .verify import cell_number, classify_deficient_square, verify_cells

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_DEFECT = 0, 1, 2, 3

log = logging.getLogger("tromino_cube")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cell_arg(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z integers, got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three coordinates, got {text!r}")
    return parts  # type: ignore[return-value]


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Sweeps


def sweep_instances(n: int, mode: str = "all", count: int = 0, seed: int = 0) -> Iterator[Instance]:
    """Instances of side ``n``: every placement, one per symmetry class, or a seeded sample."""
    k = required_deficiencies(n)
    cells = list(itertools.product(range(n), repeat=3))
    if mode == "all":
        for combo in itertools.combinations(cells, k):
            yield Instance(n, frozenset(combo))
    elif mode == "classes":
        seen = set()
        for combo in itertools.combinations(cells, k):
            canon, _ = canonicalize(Instance(n, frozenset(combo)))
            if canon not in seen:
                seen.add(canon)
                yield canon
    elif mode == "random":
        rng = random.Random(seed)
        for _ in range(count):
            yield Instance(n, frozenset(rng.sample(cells, k)))
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")


@dataclass
class SweepReport:
    n: int
    attempted: int = 0
    solved: int = 0
    max_seconds: float = 0.0
    total_seconds: float = 0.0
    failures: list[dict] = field(default_factory=list)

    @property
    def mean_seconds(self) -> float:
        return self.total_seconds / self.attempted if self.attempted else 0.0

    def to_json(self) -> dict:
        return {
            "n": self.n, "attempted": self.attempted, "solved": self.solved,
            "max_seconds": round(self.max_seconds, 6), "mean_seconds": round(self.mean_seconds, 6),
            "failures": self.failures[:20],
        }


def run_sweep(n: int, instances: Iterator[Instance]) -> SweepReport:
    report = SweepReport(n)
    for inst in instances:
        report.attempted += 1
        start = time.perf_counter()
        try:
            solve(inst)
            report.solved += 1
        except (SolverDefect, InstanceError, gadgets.GadgetError) as exc:
            report.failures.append({"deficiencies": [list(c) for c in inst.sorted_deficiencies],
                                    "error": str(exc)})
        elapsed = time.perf_counter() - start
        report.total_seconds += elapsed
        report.max_seconds = max(report.max_seconds, elapsed)
    return report


# ---------------------------------------------------------------------------
# Commands


def cmd_solve(args: argparse.Namespace) -> int:
    if args.input:
        if args.n is not None or args.deficiency:
            raise UsageError("give either an input document or --n/--deficiency, not both")
        inst = InstanceDocument.from_json(loads(_read(args.input))).to_instance()
    else:
        if args.n is None:
            raise UsageError("--n or an input document is required")
        defs = args.deficiency or []
        if len(set(defs)) != len(defs):
            raise InstanceError("duplicate deficiency cells")
        inst = Instance(args.n, frozenset(defs))
    tiling = solve(inst)  # verifies before returning
    pieces = [p.cells for p in tiling.placements]
    if args.format == "json":
        _emit(dumps(TilingDocument.of(tiling).to_json()), args.output)
    elif args.format == "layers":
        _emit(render_layers(inst.n, inst.deficiencies, pieces), args.output)
    else:
        mtl = "tromino_palette.mtl"
        _emit(render_obj(pieces, mtl), args.output)
        if args.output:
            (Path(args.output).parent / mtl).write_text(render_mtl(), encoding="utf-8")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    doc = TilingDocument.from_json(loads(_read(args.input)))
    inst = doc.instance.to_instance()
    report = verify_cells(inst.n, inst.deficiencies, doc.pieces)
    sys.stdout.write(json.dumps(report.to_json()) + "\n")
    return EXIT_OK if report.valid else EXIT_DEFECT


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    if args.random is not None:
        if args.random < 0:
            raise UsageError("--random needs a non-negative count")
        mode, count = "random", args.random
    else:
        mode, count = ("classes" if args.classes else "all"), 0
    report = run_sweep(args.n, sweep_instances(args.n, mode, count, args.seed))
    out = report.to_json()
    out["mode"] = mode
    sys.stdout.write(json.dumps(out) + "\n")
    return EXIT_OK if report.solved == report.attempted else EXIT_DEFECT


def cmd_classify2d(args: argparse.Namespace) -> int:
    try:
        cells = classify_deficient_square(args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {
        "m": args.m,
        "cells": [list(c) for c in sorted(cells)],
        "labels": sorted(cell_number(x, y, args.m) for x, y in cells),
    }
    sys.stdout.write(json.dumps(out) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tromino-cube", description=__doc__)
    parser.add_argument("--cache-dir", help=f"witness cache directory (default: ${CACHE_ENV})")
    parser.add_argument("--no-cache", action="store_true", help="do not read or write the disk cache")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="tile one instance")
    p.add_argument("input", nargs="?", help="instance JSON file, or - for stdin")
    p.add_argument("--n", type=int)
    p.add_argument("--deficiency", type=_cell_arg, action="append", metavar="X,Y,Z")
    p.add_argument("--format", choices=("json", "layers", "voxel"), default="json")
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a tiling document")
    p.add_argument("input", help="tiling JSON file, or - for stdin")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="solve many instances of one size")
    p.add_argument("--n", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--all", action="store_true", help="every deficiency placement (default)")
    mode.add_argument("--classes", action="store_true", help="one placement per symmetry class")
    mode.add_argument("--random", type=int, metavar="K", help="K seeded random placements")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("classify2d", help="tileable deficient cells of an m x m board")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_classify2d)
    return parser


def _configure_cache(args: argparse.Namespace) -> None:
    directory = None if args.no_cache else (args.cache_dir or os.environ.get(CACHE_ENV))
    gadgets.DEFAULT_CACHE.store = DiskWitnessStore(directory) if directory else None


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _configure_cache(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstanceError as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverDefect as exc:
        print(f"internal defect: {exc}", file=sys.stderr)
        return EXIT_DEFECT
    finally:
        gadgets.DEFAULT_CACHE.store = None

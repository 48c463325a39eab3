"""Independent checks: the tiling verifier, a brute-force tiling counter, and
the planar results the 3D constructions lean on.

Nothing here uses the gadget search; only the cell and placement types are
shared with the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .geometry import Cell, Instance, Tiling, TrominoPlacement, is_tromino

VIOLATION_KINDS = ("overlap", "gap", "bad-shape", "out-of-bounds", "deficiency-covered")


@dataclass(frozen=True)
class Violation:
    kind: str
    cells: tuple[Cell, ...]


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple[Violation, ...] = field(default=())

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "violations": [
                {"kind": v.kind, "cells": [list(c) for c in v.cells]} for v in self.violations
            ],
        }


def _piece_cells(piece) -> list:
    if isinstance(piece, TrominoPlacement):
        return list(piece.cells)
    return [tuple(c) for c in piece]


def verify_region(
    region: Iterable[Cell],
    pieces: Iterable[Sequence[Cell] | TrominoPlacement],
    holes: Iterable[Cell] = (),
) -> VerificationReport:
    """Check that ``pieces`` are disjoint trominoes covering ``region`` exactly.

    Cells in ``holes`` may not be covered; any other cell outside the region
    is out of bounds.
    """
    region = set(region)
    holes = set(holes)
    owner: dict[Cell, int] = {}
    overlap: list[Cell] = []
    oob: list[Cell] = []
    covered_hole: list[Cell] = []
    violations: list[Violation] = []
    for i, piece in enumerate(pieces):
        try:
            cells = _piece_cells(piece)
        except TypeError:
            violations.append(Violation("bad-shape", ()))
            continue
        if not is_tromino(cells):
            violations.append(Violation("bad-shape", tuple(tuple(c) for c in cells)))
            continue
        for c in cells:
            if c in holes:
                covered_hole.append(c)
            elif c not in region:
                oob.append(c)
                continue
            if c in owner:
                overlap.append(c)
            else:
                owner[c] = i
    gap = sorted(c for c in region if c not in owner)
    if overlap:
        violations.append(Violation("overlap", tuple(sorted(set(overlap)))))
    if gap:
        violations.append(Violation("gap", tuple(gap)))
    if oob:
        violations.append(Violation("out-of-bounds", tuple(sorted(set(oob)))))
    if covered_hole:
        violations.append(Violation("deficiency-covered", tuple(sorted(set(covered_hole)))))
    return VerificationReport(tuple(violations))


def verify_cells(n: int, deficiencies: Iterable[Cell], pieces) -> VerificationReport:
    """Verify pieces (placements or raw cell triples) against a side-``n`` cube.

    Runs in time linear in ``n**3`` plus the number of pieces.
    """
    holes = {tuple(c) for c in deficiencies}
    owner = bytearray(n * n * n)
    overlap: list[Cell] = []
    oob: list[Cell] = []
    covered_hole: list[Cell] = []
    violations: list[Violation] = []
    nn = n * n
    for piece in pieces:
        try:
            cells = _piece_cells(piece)
        except TypeError:
            violations.append(Violation("bad-shape", ()))
            continue
        if not is_tromino(cells):
            violations.append(Violation("bad-shape", tuple(tuple(c) for c in cells)))
            continue
        for c in cells:
            x, y, z = c
            if not (0 <= x < n and 0 <= y < n and 0 <= z < n):
                oob.append(c)
                continue
            if c in holes:
                covered_hole.append(c)
            i = x * nn + y * n + z
            if owner[i]:
                overlap.append(c)
            owner[i] = 1
    for c in holes:
        x, y, z = c
        if 0 <= x < n and 0 <= y < n and 0 <= z < n and not owner[x * nn + y * n + z]:
            owner[x * nn + y * n + z] = 2
    if 0 in owner:
        gap = [(i // nn, (i // n) % n, i % n) for i, v in enumerate(owner) if v == 0]
        violations.append(Violation("gap", tuple(gap)))
    if overlap:
        violations.insert(0, Violation("overlap", tuple(sorted(set(overlap)))))
    if oob:
        violations.append(Violation("out-of-bounds", tuple(sorted(set(oob)))))
    if covered_hole:
        violations.append(Violation("deficiency-covered", tuple(sorted(set(covered_hole)))))
    return VerificationReport(tuple(violations))


def verify_tiling(inst: Instance, t: Tiling | Iterable) -> VerificationReport:
    pieces = t.placements if isinstance(t, Tiling) else t
    return verify_cells(inst.n, inst.deficiencies, pieces)


# ---------------------------------------------------------------------------
# Brute-force oracle


_UNITS = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]


def _trominoes_through(c: Cell, free: set[Cell]) -> list[frozenset[Cell]]:
    out: set[frozenset[Cell]] = set()
    corners = [c] + [(c[0] + u[0], c[1] + u[1], c[2] + u[2]) for u in _UNITS]
    for k in corners:
        if k not in free:
            continue
        for i, u in enumerate(_UNITS):
            for v in _UNITS[i + 1:]:
                if any(a and b for a, b in zip(u, v)):
                    continue
                cells = frozenset({k, (k[0] + u[0], k[1] + u[1], k[2] + u[2]),
                                   (k[0] + v[0], k[1] + v[1], k[2] + v[2])})
                if c in cells and cells <= free:
                    out.add(cells)
    return sorted(out, key=sorted)


def brute_force_enumerate(region: Iterable[Cell], limit: int | None = None) -> list[frozenset[frozenset[Cell]]]:
    """All tromino tilings of ``region`` (each a set of cell triples), up to ``limit``.

    Plain depth-first enumeration branching on the lexicographically greatest
    free cell.
    """
    free = set(region)
    if len(free) % 3:
        return []
    found: list[frozenset[frozenset[Cell]]] = []
    chosen: list[frozenset[Cell]] = []

    def go() -> bool:
        if not free:
            found.append(frozenset(chosen))
            return limit is not None and len(found) >= limit
        c = max(free)
        for piece in _trominoes_through(c, free):
            free.difference_update(piece)
            chosen.append(piece)
            stop = go()
            chosen.pop()
            free.update(piece)
            if stop:
                return True
        return False

    go()
    return found


def brute_force_count(region: Iterable[Cell], limit: int | None = None) -> int:
    return len(brute_force_enumerate(region, limit))


# ---------------------------------------------------------------------------
# Planar results


def golomb_2d(k: int, deficiency: Sequence[int]) -> list[TrominoPlacement]:
    """Tile the ``2^k`` square (in the plane z = 0) minus one cell.

    One tromino goes around the centre, covering a cell in each quadrant that
    does not hold the deficiency; each quadrant is then tiled recursively.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    size = 2 ** k
    dx, dy = deficiency[0], deficiency[1]
    if not (0 <= dx < size and 0 <= dy < size):
        raise ValueError(f"deficiency {tuple(deficiency)} outside the {size}x{size} square")
    out: list[TrominoPlacement] = []

    def rec(x0: int, y0: int, s: int, hx: int, hy: int) -> None:
        h = s // 2
        centre = []
        holes = []
        for qx in (0, 1):
            for qy in (0, 1):
                ax, ay = x0 + qx * h, y0 + qy * h
                if ax <= hx < ax + h and ay <= hy < ay + h:
                    holes.append((ax, ay, hx, hy))
                else:
                    cx, cy = x0 + h - 1 + qx, y0 + h - 1 + qy
                    centre.append((cx, cy, 0))
                    holes.append((ax, ay, cx, cy))
        out.append(TrominoPlacement.from_cells(centre))
        if h > 1:
            for ax, ay, px, py in holes:
                rec(ax, ay, h, px, py)

    rec(0, 0, size, dx, dy)
    return out


def square_region(m: int) -> set[Cell]:
    return {(x, y, 0) for x in range(m) for y in range(m)}


def classify_deficient_square(m: int) -> set[tuple[int, int]]:
    """Cells whose removal leaves an ``m x m`` board tileable by L-trominoes."""
    if m < 1 or m > 7:
        raise ValueError(f"classification is exhaustive and limited to 1 <= m <= 7, got {m}")
    board = square_region(m)
    return {
        (x, y)
        for x in range(m) for y in range(m)
        if brute_force_count(board - {(x, y, 0)}, limit=1)
    }


def cell_number(x: int, y: int, m: int) -> int:
    """Row-major 1-based label of a square cell, top row first (row = ``m - 1 - y``)."""
    return (m - 1 - y) * m + x + 1

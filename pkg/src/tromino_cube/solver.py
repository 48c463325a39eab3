"""Tile an n-cube with L-trominoes, leaving ``n**3 mod 3`` given cells empty.

Dispatch on ``n mod 3``:

* ``n = 3k``: a grid of 3x3x3 cubes.
* ``n`` in {1, 2, 4, 5}: base cases, solved once per symmetry class.
* ``n = 3k+1 >= 7``: a corner subcube of side ``n - 3`` holding the deficiency
  is solved recursively; the shell around it (three slabs, three rods and a
  3x3x3 corner cube) is tiled constructively.
* ``n = 3k+2 >= 8``: as above when one corner subcube holds both deficiencies.
  Otherwise one deficiency ``T`` sits in the shell, and a short chain of
  protruding trominoes moves a hole from the shell into the subcube, which is
  then solved as a doubly deficient cube.

All work happens in a frame where the chosen subcube is ``[0, m)^3``; the
result is reflected back at the end.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import gadgets
from .constructive import (
    decompose_rod,
    segment_offsets,
    tile_box,
    tile_rod_segments,
)
from .geometry import (
    CORNERS,
    BoxRegion,
    Cell,
    Instance,
    InstanceError,
    Isometry,
    Tiling,
    TrominoPlacement,
    canonicalize,
    corner_subcube,
)
from .verify import verify_tiling

log = logging.getLogger(__name__)

Trace = list[tuple[int, str]]
Pieces = list[TrominoPlacement]


class SolverDefect(RuntimeError):
    """The solver failed on a valid instance. This is a bug, never an input problem."""


# ---------------------------------------------------------------------------
# Shell decomposition


def _box(ranges: Sequence[tuple[int, int]]) -> BoxRegion:
    return BoxRegion.from_bounds([r[0] for r in ranges], [r[1] for r in ranges])


@dataclass(frozen=True)
class ShellDecomposition:
    """The side-``n`` cube split around the inner subcube ``[0, n-3)^3``.

    ``slabs[a]`` is the slab stacked on the inner cube along axis ``a``;
    ``rods[a]`` is the rod running along axis ``a``.
    """

    n: int
    inner: BoxRegion
    slabs: tuple[BoxRegion, BoxRegion, BoxRegion]
    rods: tuple[BoxRegion, BoxRegion, BoxRegion]
    corner: BoxRegion

    @classmethod
    def of(cls, n: int) -> "ShellDecomposition":
        if n < 4:
            raise ValueError(f"a shell decomposition needs n >= 4, got {n}")
        m = n - 3
        lo, hi = (0, m), (m, n)
        slabs = tuple(_box([hi if i == a else lo for i in range(3)]) for a in range(3))
        rods = tuple(_box([lo if i == a else hi for i in range(3)]) for a in range(3))
        return cls(n, _box([lo] * 3), slabs, rods, _box([hi] * 3))  # type: ignore[arg-type]

    @property
    def m(self) -> int:
        return self.n - 3

    def parts(self) -> list[tuple[str, int, BoxRegion]]:
        return ([("inner", -1, self.inner)]
                + [("slab", a, b) for a, b in enumerate(self.slabs)]
                + [("rod", a, b) for a, b in enumerate(self.rods)]
                + [("corner", -1, self.corner)])

    def volumes(self) -> list[int]:
        return [box.volume for _, _, box in self.parts()]

    def part_of(self, c: Cell) -> tuple[str, int]:
        m = self.m
        outer = [a for a in range(3) if c[a] >= m]
        if not outer:
            return ("inner", -1)
        if len(outer) == 1:
            return ("slab", outer[0])
        if len(outer) == 2:
            return ("rod", ({0, 1, 2} - set(outer)).pop())
        return ("corner", -1)


def _tile_shell(n: int, skip: Iterable[tuple[str, int]] = ()) -> Pieces:
    shell = ShellDecomposition.of(n)
    skip = set(skip)
    out: Pieces = []
    for kind, axis, box in shell.parts()[1:]:
        if (kind, axis) not in skip:
            out += tile_box(box)
    return out


def _corner_frame(n: int, corner: Sequence[int]) -> Isometry:
    """Reflection taking the corner subcube at ``corner`` onto the low corner (an involution)."""
    return Isometry((0, 1, 2), tuple(-1 if b else 1 for b in corner),
                    tuple(n - 1 if b else 0 for b in corner))  # type: ignore[arg-type]


def _map(iso: Isometry, pieces: Pieces) -> Pieces:
    if iso.is_identity:
        return pieces
    return [iso.placement(p) for p in pieces]


# ---------------------------------------------------------------------------
# Slab partitions


Footprint = frozenset[tuple[int, int]]


def _rect(u0: int, v0: int, w: int, h: int) -> Footprint:
    return frozenset((u, v) for u in range(u0, u0 + w) for v in range(v0, v0 + h))


# 5x5 slab footprints. LEFT: a 3x3 cube, two 2x2 columns, four 2x1 columns.
# CENTRE: a 2x2 column over the middle, nine 2x1 columns and one L-shaped
# stack of three flat trominoes.
_FIVE_LEFT: tuple[Footprint, ...] = (
    _rect(0, 0, 3, 3), _rect(3, 3, 2, 2), _rect(3, 1, 2, 2),
    _rect(3, 0, 2, 1), _rect(0, 3, 1, 2), _rect(1, 3, 1, 2), _rect(2, 3, 1, 2),
)
_FIVE_CENTRE: tuple[Footprint, ...] = (
    _rect(1, 1, 2, 2),
    _rect(0, 4, 2, 1), _rect(2, 4, 2, 1), _rect(4, 3, 1, 2), _rect(0, 3, 2, 1),
    _rect(2, 3, 2, 1), _rect(0, 1, 1, 2), _rect(0, 0, 2, 1), _rect(2, 0, 2, 1),
    _rect(4, 0, 1, 2),
    frozenset({(3, 1), (3, 2), (4, 2)}),
)


def _dihedral(m: int) -> list:
    f = m - 1
    return [
        lambda u, v: (u, v), lambda u, v: (f - u, v), lambda u, v: (u, f - v),
        lambda u, v: (f - u, f - v), lambda u, v: (v, u), lambda u, v: (f - v, u),
        lambda u, v: (v, f - u), lambda u, v: (f - v, f - u),
    ]


def _is_2x2(piece: Footprint) -> bool:
    us = {u for u, _ in piece}
    vs = {v for _, v in piece}
    return len(piece) == 4 and len(us) == 2 and len(vs) == 2


def slab_partition(m: int, target: tuple[int, int]) -> tuple[Footprint, list[Footprint]]:
    """Split an ``m x m`` slab footprint into pieces with a 2x2 piece holding ``target``.

    Returns ``(column, others)``. Every other piece is a rectangle whose
    column is tileable (3x3, 3x2, 2x2, 2x1) or an L-tromino footprint.
    """
    u, v = target
    if m % 2 == 0:
        pieces = [_rect(i, j, 2, 2) for i in range(0, m, 2) for j in range(0, m, 2)]
    elif m == 5:
        if target == (2, 2):
            pieces = list(_FIVE_CENTRE)
        else:
            for f in _dihedral(5):
                pieces = [frozenset(f(a, b) for a, b in p) for p in _FIVE_LEFT]
                if any(_is_2x2(p) and target in p for p in pieces):
                    break
    elif m >= 11:
        # 3-wide strips on the side away from the target, 2x2 columns elsewhere.
        su = 0 if u >= m - 3 else m - 3
        sv = 0 if v >= m - 3 else m - 3
        ru = list(range(0, m - 3, 2))
        rest_u = [r + (3 if su == 0 else 0) for r in ru]
        rest_v = [r + (3 if sv == 0 else 0) for r in ru]
        pieces = [_rect(su, sv, 3, 3)]
        pieces += [_rect(a, sv, 2, 3) for a in rest_u]
        pieces += [_rect(su, b, 3, 2) for b in rest_v]
        pieces += [_rect(a, b, 2, 2) for a in rest_u for b in rest_v]
    else:
        raise ValueError(f"no slab partition for side {m}")
    column = next(p for p in pieces if _is_2x2(p) and target in p)
    return column, [p for p in pieces if p is not column]


def _axes_except(a: int) -> tuple[int, int]:
    b, c = [i for i in range(3) if i != a]
    return b, c


def _lift(a: int, uv: tuple[int, int], level: int) -> Cell:
    b, c = _axes_except(a)
    cell = [0, 0, 0]
    cell[a], cell[b], cell[c] = level, uv[0], uv[1]
    return tuple(cell)  # type: ignore[return-value]


def _tile_footprint(a: int, piece: Footprint, levels: range) -> Pieces:
    cells = [_lift(a, uv, levels.start) for uv in piece]
    lo = [min(c[i] for c in cells) for i in range(3)]
    hi = [max(c[i] for c in cells) + 1 for i in range(3)]
    hi[a] = levels.stop
    box = BoxRegion.from_bounds(lo, hi)
    if box.volume == len(piece) * len(levels):
        return tile_box(box)
    # L-shaped footprint: one flat tromino per level.
    return [TrominoPlacement.from_cells([_lift(a, uv, z) for uv in sorted(piece)]) for z in levels]


# ---------------------------------------------------------------------------
# Protrusion gadgets


def _protrude(region: Iterable[Cell], sites: Iterable[Cell], avoid: Iterable[Cell] = ()
              ) -> gadgets.GadgetSolution:
    """Tile ``region`` with one tromino poking into ``sites``, not at a cell of ``avoid``."""
    region, sites, avoid = frozenset(region), frozenset(sites), frozenset(avoid)
    prob = gadgets.GadgetProblem(region, protrusion_sites=sites, protrusion_budget=1)
    sol = gadgets.solve_gadget(prob)
    if sol is not None and not (sol.used & avoid):
        return sol
    if sol is not None:
        log.warning("protrusion landed on %s; trying other witnesses", sorted(sol.used & avoid))
        allowed = sites - avoid
        if allowed:
            sol = gadgets.solve_gadget(gadgets.GadgetProblem(region, protrusion_sites=allowed,
                                                             protrusion_budget=1))
            if sol is not None:
                return sol
    raise SolverDefect(f"no protruding witness for a {len(region)}-cell gadget")


def _deficient_slab(n: int, a: int, hole: Cell, avoid: Iterable[Cell]) -> tuple[Pieces, Cell]:
    """Tile slab ``a`` minus ``hole``, pushing one cell into the inner cube.

    Returns the pieces and the inner-cube cell they occupy.
    """
    m = n - 3
    b, c = _axes_except(a)
    levels = range(m, n)
    column, others = slab_partition(m, (hole[b], hole[c]))
    out: Pieces = []
    for piece in others:
        out += _tile_footprint(a, piece, levels)
    region = {_lift(a, uv, z) for uv in column for z in levels} - {hole}
    sites = {_lift(a, uv, m - 1) for uv in column}
    sol = _protrude(region, sites, avoid)
    out += sol.placements
    (p,) = sol.used
    return out, p


def _rod_box(n: int, a: int, s: int) -> BoxRegion:
    m = n - 3
    return _box([(s, s + 2) if i == a else (m, n) for i in range(3)])


def _rod_start(n: int, t: int, prefer_below: int | None) -> tuple[int, list[int]]:
    """A 2-segment start ``s`` with ``s <= t < s + 2`` admitted by :func:`decompose_rod`."""
    options = [s for s in (t - 1, t) if 0 <= s <= n - 2]
    if prefer_below is not None:
        options.sort(key=lambda s: s + 2 > prefer_below)
    for s in options:
        try:
            return s, decompose_rod(n, s)
        except ValueError:
            continue
    raise SolverDefect(f"no rod split of length {n} puts a 2-box over {t}")


def _extended_rod(n: int, a: int, segments: list[int], box_start: int) -> Pieces:
    m = n - 3
    origin = tuple(0 if i == a else m for i in range(3))
    skip = [segment_offsets(segments).index(box_start)]
    return tile_rod_segments(origin, a, segments, skip)


def _rod_chain(n: int, a: int, hole: Cell, avoid: Iterable[Cell]
               ) -> tuple[Pieces, Cell, set[tuple[str, int]]]:
    """``hole`` in rod ``a``: its 3x3x2 box pushes a cell into a slab, which pushes into the inner cube."""
    m = n - 3
    s, segments = _rod_start(n, hole[a], prefer_below=m)
    box = _rod_box(n, a, s)
    sites = set()
    for b in _axes_except(a):
        c = 3 - a - b
        for k in range(s, min(s + 2, m)):
            for w in range(m, n):
                cell = [0, 0, 0]
                cell[a], cell[b], cell[c] = k, m - 1, w
                sites.add(tuple(cell))
    first = _protrude(set(box.cells()) - {hole}, sites)
    (p1,) = first.used
    kind, slab_axis = ShellDecomposition.of(n).part_of(p1)
    assert kind == "slab"
    slab_pieces, p = _deficient_slab(n, slab_axis, p1, avoid)
    out = list(first.placements) + slab_pieces + _extended_rod(n, a, segments, s)
    return out, p, {("rod", a), ("corner", -1), ("slab", slab_axis)}


def _corner_chain(n: int, hole: Cell, avoid: Iterable[Cell]
                  ) -> tuple[Pieces, Cell, set[tuple[str, int]]]:
    """``hole`` in the 3x3x3 corner cube.

    The corner cube joins rod ``a`` into a rod of length ``n``; the 3x3x2 box
    of that rod holding the hole pushes a cell into the end of rod ``b``.
    That end box, together with a corner column of slab ``d``, pushes the
    final cell into the inner cube.
    """
    m = n - 3
    choice = None
    for a in range(3):
        try:
            s, segments = _rod_start(n, hole[a], prefer_below=None)
        except SolverDefect:
            continue
        if s >= m:
            choice = (a, s, segments)
            break
        if choice is None:
            choice = (a, s, segments)
    assert choice is not None
    a, s, segments = choice
    b = _axes_except(a)[0]
    c = 3 - a - b
    box = _rod_box(n, a, s)
    sites = set()
    for k in range(max(s, m), s + 2):
        for w in range(m, n):
            cell = [0, 0, 0]
            cell[a], cell[b], cell[c] = k, m - 1, w
            sites.add(tuple(cell))
    first = _protrude(set(box.cells()) - {hole}, sites)
    (p1,) = first.used

    end_box = _box([(m - 2, m) if i == b else (m, n) for i in range(3)])
    for d in (a, c):
        column_cells = {cell for cell in _box(
            [(m, n) if i == d else (m - 2, m) for i in range(3)]).cells()}
        sites2 = {cell[:d] + (m - 1,) + cell[d + 1:] for cell in column_cells if cell[d] == m}
        try:
            second = _protrude((set(end_box.cells()) - {p1}) | column_cells, sites2, avoid)
        except SolverDefect:
            continue
        break
    else:
        raise SolverDefect("no composite corner gadget")
    (p,) = second.used

    column, others = slab_partition(m, (m - 1, m - 1))
    assert column == _rect(m - 2, m - 2, 2, 2)
    out = list(first.placements) + list(second.placements)
    for piece in others:
        out += _tile_footprint(d, piece, range(m, n))
    out += _extended_rod(n, a, segments, s)
    out += tile_box(_box([(0, m - 2) if i == b else (m, n) for i in range(3)]))
    return out, p, {("rod", a), ("corner", -1), ("rod", b), ("slab", d)}


# ---------------------------------------------------------------------------
# Recursion


_base_lock = threading.Lock()
_base_cache: dict[Instance, tuple[tuple[TrominoPlacement, ...], tuple[tuple[int, str], ...]]] = {}


def clear_caches() -> None:
    with _base_lock:
        _base_cache.clear()
    gadgets.DEFAULT_CACHE.clear()


def _whole_cube(n: int, holes: Iterable[Cell]) -> frozenset[Cell]:
    return frozenset(BoxRegion((0, 0, 0), (n, n, n)).cells()) - frozenset(holes)


def _search(region: frozenset[Cell], what: str) -> Pieces:
    sol = gadgets.solve_gadget(gadgets.GadgetProblem(region))
    if sol is None:
        raise SolverDefect(f"search found no tiling of {what}")
    return list(sol.placements)


def _solve_5cube_direct(defs: Sequence[Cell], trace: Trace) -> Pieces:
    subs = [corner_subcube(5, 4, c) for c in CORNERS]
    for sub in subs:
        inside = [d for d in defs if d in sub]
        if len(inside) == 1:
            (s,) = inside
            (t,) = [d for d in defs if d != s]
            trace.append((5, "side5/one-in-corner"))
            local = tuple(x - o for x, o in zip(s, sub.origin))
            inner = [p.translated(sub.origin) for p in _solve_base(4, (local,), trace)]
            shell = _whole_cube(5, [t]) - frozenset(sub.cells())
            return inner + _search(shell, "the side-5 shell")
    trace.append((5, "side5/search"))
    return _search(_whole_cube(5, defs), "the doubly deficient 5-cube")


def _solve_base(n: int, defs: Sequence[Cell], trace: Trace) -> Pieces:
    canon, iso = canonicalize(Instance(n, frozenset(defs)))
    with _base_lock:
        hit = _base_cache.get(canon)
    if hit is None:
        sub_trace: Trace = []
        if n == 1:
            sub_trace.append((1, "empty"))
            pieces: Pieces = []
        elif n == 5:
            pieces = _solve_5cube_direct(canon.sorted_deficiencies, sub_trace)
        else:
            sub_trace.append((n, "search"))
            pieces = _search(_whole_cube(n, canon.deficiencies), f"the side-{n} base cube")
        hit = (tuple(pieces), tuple(sub_trace))
        with _base_lock:
            hit = _base_cache.setdefault(canon, hit)
    trace.extend(hit[1])
    return _map(iso.inverse(), list(hit[0]))


def _solve_1mod3(n: int, defs: Sequence[Cell], trace: Trace) -> Pieces:
    (t,) = defs
    m = n - 3
    corner = next(c for c in CORNERS if t in corner_subcube(n, m, c))
    frame = _corner_frame(n, corner)
    trace.append((n, "one-hole-shell"))
    inner = _solve(m, (frame.cell(t),), trace)
    return _map(frame, inner + _tile_shell(n))


def two_hole_plan(n: int, defs: Sequence[Cell]) -> tuple[str, tuple[int, int, int], Cell, Cell]:
    """Which two-hole case applies: ``(case, corner, S, T)`` with ``S`` in the corner subcube.

    ``case`` is one of ``both-in-C``, ``T-in-slab``, ``T-in-rod``, ``T-in-corner``.
    """
    m = n - 3
    d0, d1 = sorted(defs)
    for c in CORNERS:
        sub = corner_subcube(n, m, c)
        if d0 in sub and d1 in sub:
            return "both-in-C", c, d0, d1
    for c in CORNERS:
        sub = corner_subcube(n, m, c)
        if d0 in sub or d1 in sub:
            s, t = (d0, d1) if d0 in sub else (d1, d0)
            kind, _ = ShellDecomposition.of(n).part_of(_corner_frame(n, c).cell(t))
            return "T-in-" + kind, c, s, t
    raise SolverDefect("no corner subcube holds a deficiency")


def _solve_2mod3(n: int, defs: Sequence[Cell], trace: Trace) -> Pieces:
    m = n - 3
    case, corner, s, t = two_hole_plan(n, defs)
    frame = _corner_frame(n, corner)
    s, t = frame.cell(s), frame.cell(t)
    trace.append((n, "two-holes/" + case))
    if case == "both-in-C":
        inner = _solve(m, tuple(sorted((s, t))), trace)
        return _map(frame, inner + _tile_shell(n))
    kind, axis = ShellDecomposition.of(n).part_of(t)
    if kind == "slab":
        pieces, p = _deficient_slab(n, axis, t, avoid=[s])
        skip = {("slab", axis)}
    elif kind == "rod":
        pieces, p, skip = _rod_chain(n, axis, t, avoid=[s])
    else:
        pieces, p, skip = _corner_chain(n, t, avoid=[s])
    if p == s:
        raise SolverDefect("protrusion collided with the inner deficiency")
    inner = _solve(m, tuple(sorted((s, p))), trace)
    return _map(frame, inner + pieces + _tile_shell(n, skip))


def _solve(n: int, defs: Sequence[Cell], trace: Trace) -> Pieces:
    if n % 3 == 0:
        trace.append((n, "cube-grid"))
        return tile_box(BoxRegion((0, 0, 0), (n, n, n)))
    if n <= 5:
        return _solve_base(n, defs, trace)
    if n % 3 == 1:
        return _solve_1mod3(n, defs, trace)
    return _solve_2mod3(n, defs, trace)


def _finish(inst: Instance, pieces: Pieces, trace: Trace) -> Tiling:
    tiling = Tiling(inst, tuple(pieces), tuple(trace))
    report = verify_tiling(inst, tiling)
    if not report.valid:
        raise SolverDefect(f"solver produced an invalid tiling of {inst}: {sorted(report.kinds())}")
    return tiling


def solve(inst: Instance) -> Tiling:
    """A verified tiling of any valid instance; deterministic."""
    if not isinstance(inst, Instance):
        raise TypeError("solve expects an Instance")
    trace: Trace = []
    return _finish(inst, _solve(inst.n, inst.sorted_deficiencies, trace), trace)


def _require(inst: Instance, ok: bool, what: str) -> None:
    if not ok:
        raise InstanceError(f"{what} does not apply to side {inst.n}")


def solve_base(inst: Instance) -> Tiling:
    _require(inst, inst.n in (1, 2, 4, 5), "base-case solving")
    trace: Trace = []
    return _finish(inst, _solve_base(inst.n, inst.sorted_deficiencies, trace), trace)


def solve_5cube(inst: Instance) -> Tiling:
    _require(inst, inst.n == 5, "the side-5 procedure")
    trace: Trace = []
    return _finish(inst, _solve_5cube_direct(inst.sorted_deficiencies, trace), trace)


def solve_1mod3(inst: Instance) -> Tiling:
    _require(inst, inst.n % 3 == 1 and inst.n >= 7, "the 3k+1 recursion")
    trace: Trace = []
    return _finish(inst, _solve_1mod3(inst.n, inst.sorted_deficiencies, trace), trace)


def solve_2mod3(inst: Instance) -> Tiling:
    _require(inst, inst.n % 3 == 2 and inst.n >= 8, "the 3k+2 recursion")
    trace: Trace = []
    return _finish(inst, _solve_2mod3(inst.n, inst.sorted_deficiencies, trace), trace)

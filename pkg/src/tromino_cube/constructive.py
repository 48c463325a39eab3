"""Search-free tilers for the boxes, rods and slabs the recursion is built from.

Every builder takes a placement frame: ``origin`` is the minimum corner of
the box in the output, ``orientation`` is an isometry whose linear part
rotates/reflects the builder's local box (its shift is ignored). The local
boxes are

=====================  ==============
builder                local extent
=====================  ==============
``tile_box_3x2x1``     (3, 2, 1)
``tile_box_3x2xn``     (3, 2, n)
``tile_cube_3x3x3``    (3, 3, 3)
``tile_rod_3x3xn``     (3, 3, n)
``tile_slab``          (3, s, s)
=====================  ==============
"""

from __future__ import annotations

from typing import Sequence

from .geometry import BoxRegion, Cell, Instance, Isometry, Tiling, TrominoPlacement

Extent = tuple[int, int, int]

# One flat 3x2x1 box on top, two boxes lying on their long
# edges, and three parallel trominoes (the stack along y) between them.
_CUBE_3X3X3: tuple[tuple[Cell, Cell, Cell], ...] = (
    ((0, 0, 2), (0, 1, 2), (1, 0, 2)),
    ((1, 2, 2), (0, 2, 2), (1, 1, 2)),
    ((0, 0, 0), (0, 0, 1), (0, 1, 0)),
    ((0, 2, 1), (0, 1, 1), (0, 2, 0)),
    ((2, 0, 1), (2, 0, 2), (2, 1, 1)),
    ((2, 2, 2), (2, 1, 2), (2, 2, 1)),
    ((1, 0, 0), (1, 0, 1), (2, 0, 0)),
    ((1, 1, 0), (1, 1, 1), (2, 1, 0)),
    ((1, 2, 0), (1, 2, 1), (2, 2, 0)),
)

_BOX_3X2X1: tuple[tuple[Cell, Cell, Cell], ...] = (
    ((0, 0, 0), (1, 0, 0), (0, 1, 0)),
    ((2, 1, 0), (1, 1, 0), (2, 0, 0)),
)


def _from_cells(triples) -> list[TrominoPlacement]:
    return [TrominoPlacement.from_cells(t) for t in triples]


def _place(
    local: Sequence[TrominoPlacement],
    extent: Extent,
    origin: Sequence[int],
    orientation: Isometry | None = None,
) -> list[TrominoPlacement]:
    """Rotate a local tiling of ``[0, extent)`` and drop its box at ``origin``."""
    if orientation is None or orientation.is_identity:
        if tuple(origin) == (0, 0, 0):
            return list(local)
        return [p.translated(origin) for p in local]
    lin = Isometry(orientation.perm, orientation.signs)
    far = lin.linear(tuple(e - 1 for e in extent))
    lo = tuple(min(0, f) for f in far)
    frame = Isometry(lin.perm, lin.signs, tuple(o - l for o, l in zip(origin, lo)))
    return [frame.placement(p) for p in local]


def oriented_extent(extent: Extent, orientation: Isometry | None) -> Extent:
    if orientation is None:
        return extent
    return tuple(abs(v) for v in orientation.linear(extent))  # type: ignore[return-value]


def _check_fits(origin: Sequence[int], extent: Extent, bounds: int | None) -> None:
    if any(o < 0 for o in origin):
        raise ValueError(f"box origin {tuple(origin)} has a negative coordinate")
    if bounds is not None and any(o + e > bounds for o, e in zip(origin, extent)):
        raise ValueError(f"box at {tuple(origin)} with extent {extent} leaves the cube of side {bounds}")


def tile_box_3x2x1(origin=(0, 0, 0), orientation: Isometry | None = None,
                   bounds: int | None = None) -> list[TrominoPlacement]:
    _check_fits(origin, oriented_extent((3, 2, 1), orientation), bounds)
    return _place(_from_cells(_BOX_3X2X1), (3, 2, 1), origin, orientation)


def tile_box_3x2xn(origin=(0, 0, 0), orientation: Isometry | None = None, n: int = 1,
                   bounds: int | None = None) -> list[TrominoPlacement]:
    """``n`` parallel 3x2x1 layers stacked along the local z axis."""
    if n < 1:
        raise ValueError(f"box length must be >= 1, got {n}")
    _check_fits(origin, oriented_extent((3, 2, n), orientation), bounds)
    layer = _from_cells(_BOX_3X2X1)
    local = [p.translated((0, 0, k)) for k in range(n) for p in layer]
    return _place(local, (3, 2, n), origin, orientation)


def tile_cube_3x3x3(origin=(0, 0, 0), orientation: Isometry | None = None,
                    bounds: int | None = None) -> list[TrominoPlacement]:
    _check_fits(origin, (3, 3, 3), bounds)
    return _place(_from_cells(_CUBE_3X3X3), (3, 3, 3), origin, orientation)


def _box_3x3x2_local() -> list[TrominoPlacement]:
    # A 3x3x2 box is a 3x2x3 box lying on its side: three 3x2x1 layers along y.
    return tile_box_3x2xn((0, 0, 0), Isometry((0, 2, 1)), 3)


def tile_rod_3x3xn(origin=(0, 0, 0), orientation: Isometry | None = None, n: int = 2,
                   bounds: int | None = None) -> list[TrominoPlacement]:
    """3x3x2 blocks along the local z axis; for odd ``n`` a 3x3x3 cube at the low end."""
    if n < 2:
        raise ValueError(f"a 3x3xn rod needs n >= 2, got {n}")
    _check_fits(origin, oriented_extent((3, 3, n), orientation), bounds)
    local = _rod_local(rod_segments(n))
    return _place(local, (3, 3, n), origin, orientation)


def rod_segments(n: int) -> list[int]:
    """Standard split of a rod of length ``n >= 2`` into 3 (odd only, first) and 2s."""
    return ([3] + [2] * ((n - 3) // 2)) if n % 2 else [2] * (n // 2)


def _rod_local(segments: Sequence[int]) -> list[TrominoPlacement]:
    out: list[TrominoPlacement] = []
    z = 0
    block2 = _box_3x3x2_local()
    block3 = _from_cells(_CUBE_3X3X3)
    for seg in segments:
        block = block3 if seg == 3 else block2
        out.extend(p.translated((0, 0, z)) for p in block)
        z += seg
    return out


def decompose_rod(length: int, required_box_start: int) -> list[int]:
    """Split a rod into segments of length 2 and at most one of length 3 so
    that a 2-segment starts exactly at ``required_box_start``.

    Among the valid splits the one whose 3-segment comes first is returned.
    Raises ``ValueError`` when no such split exists (e.g. even length with an
    odd start).
    """
    if length < 2:
        raise ValueError(f"rod length must be >= 2, got {length}")
    candidates: list[list[int]] = []
    if length % 2 == 0:
        candidates.append([2] * (length // 2))
    else:
        for before in range((length - 3) // 2 + 1):
            candidates.append([2] * before + [3] + [2] * ((length - 3) // 2 - before))
    for segs in candidates:
        offset = 0
        for seg in segs:
            if seg == 2 and offset == required_box_start:
                return segs
            offset += seg
    raise ValueError(
        f"no split of a length-{length} rod into 2s and one 3 has a 2-box at {required_box_start}"
    )


def segment_offsets(segments: Sequence[int]) -> list[int]:
    out, offset = [], 0
    for seg in segments:
        out.append(offset)
        offset += seg
    return out


def tile_rod_segments(origin, axis: int, segments: Sequence[int],
                      skip: Sequence[int] = ()) -> list[TrominoPlacement]:
    """Tile a 3x3 rod along ``axis`` by the given segments, leaving out segment indices in ``skip``."""
    out: list[TrominoPlacement] = []
    for i, (seg, off) in enumerate(zip(segments, segment_offsets(segments))):
        if i in skip:
            continue
        lo = list(origin)
        lo[axis] += off
        ext = [3, 3, 3]
        ext[axis] = seg
        out.extend(tile_box(BoxRegion(tuple(lo), tuple(ext))))  # type: ignore[arg-type]
    return out


def tile_slab(origin=(0, 0, 0), orientation: Isometry | None = None, side: int = 4,
              bounds: int | None = None) -> list[TrominoPlacement]:
    """A 3 x s x s slab (thickness along local x) for ``s mod 3`` in {1, 2}, ``s >= 4``.

    Even sides split into 3 x 2 x s boxes. Odd sides peel off two rods and a
    3x3x3 cube, leaving an even slab of side ``s - 3``.
    """
    if side < 4 or side % 3 == 0:
        raise ValueError(f"slab side must be >= 4 and not a multiple of 3, got {side}")
    _check_fits(origin, oriented_extent((3, side, side), orientation), bounds)
    return _place(_slab_local(side), (3, side, side), origin, orientation)


def _slab_local(s: int) -> list[TrominoPlacement]:
    if s % 2 == 0:
        return _even_slab_local(s)
    r = s - 3
    out = _even_slab_local(r)
    out += tile_box(BoxRegion((0, r, 0), (3, 3, r)))
    out += tile_box(BoxRegion((0, 0, r), (3, r, 3)))
    out += tile_cube_3x3x3((0, r, r))
    return out


def _even_slab_local(s: int) -> list[TrominoPlacement]:
    # 3 x 2 x s boxes: pairs of y-columns running the full z length.
    out: list[TrominoPlacement] = []
    for y in range(0, s, 2):
        out += tile_box_3x2xn((0, y, 0), None, s)
    return out


def tile_multiple_of_3_cube(n: int) -> Tiling:
    """Side ``n`` divisible by 3, tiled as a grid of 3x3x3 cubes."""
    if n < 3 or n % 3:
        raise ValueError(f"side must be a positive multiple of 3, got {n}")
    inst = Instance(n)
    return Tiling(inst, tuple(tile_box(BoxRegion((0, 0, 0), (n, n, n)))), ((n, "cube-grid"),))


def _orientation_for(local: Extent, target: Sequence[int]) -> Isometry:
    """Axis permutation taking a local extent onto ``target`` (a permutation of it)."""
    remaining = list(range(3))
    perm = []
    for t in target:
        j = next(i for i in remaining if local[i] == t)
        remaining.remove(j)
        perm.append(j)
    return Isometry(tuple(perm))  # type: ignore[arg-type]


def tileable_box(extent: Sequence[int]) -> bool:
    try:
        _box_plan(extent)
    except ValueError:
        return False
    return True


def _box_plan(extent: Sequence[int]) -> tuple[str, Extent]:
    e = tuple(extent)
    threes = [i for i in range(3) if e[i] == 3]
    if all(v % 3 == 0 for v in e):
        return "cubes", e  # type: ignore[return-value]
    if len(threes) >= 2:
        long = e[[i for i in range(3) if i not in threes[:2]][0]]
        if long >= 2:
            return "rod", (3, 3, long)
    if threes:
        others = [e[i] for i in range(3) if i != threes[0]]
        if others[0] == others[1] and others[0] >= 4 and others[0] % 3:
            return "slab", (3, others[0], others[0])
        if others[0] % 2 == 0:
            return "layers", (3, others[0], others[1])
        if others[1] % 2 == 0:
            return "layers", (3, others[1], others[0])
    raise ValueError(f"no constructive tiling for a box of extent {e}")


def tile_box(box: BoxRegion) -> list[TrominoPlacement]:
    """Tile any box the lemmas cover: 3-cube grids, 3x3xL rods, slabs, and
    boxes with one side 3 and another even."""
    kind, local = _box_plan(box.extent)
    if kind == "cubes":
        ox, oy, oz = box.origin
        dx, dy, dz = box.extent
        block = _from_cells(_CUBE_3X3X3)
        return [
            p.translated((ox + i, oy + j, oz + k))
            for i in range(0, dx, 3) for j in range(0, dy, 3) for k in range(0, dz, 3)
            for p in block
        ]
    orient = _orientation_for(local, box.extent)
    if kind == "rod":
        return tile_rod_3x3xn(box.origin, orient, local[2])
    if kind == "slab":
        return tile_slab(box.origin, orient, local[1])
    # 3 x (2k) x L: k boxes of 3 x 2 x L side by side along local y.
    _, width, length = local
    layer: list[TrominoPlacement] = []
    for y in range(0, width, 2):
        layer += tile_box_3x2xn((0, y, 0), None, length)
    return _place(layer, local, box.origin, orient)

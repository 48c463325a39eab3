"""Lattice cells, L-tromino placements, boxes and the symmetry group of the cube.

Coordinates: x to the right, y toward the viewer (the front face of a side-n
cube is the plane ``y == n - 1``), z upward.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

Cell = tuple[int, int, int]
Vector = tuple[int, int, int]

AXIS_NAMES = "xyz"

# Fixed enumeration order of the six unit directions: +x, -x, +y, -y, +z, -z.
DIRECTIONS: tuple[Vector, ...] = (
    (1, 0, 0), (-1, 0, 0),
    (0, 1, 0), (0, -1, 0),
    (0, 0, 1), (0, 0, -1),
)

# The 12 tromino orientations up to translation, as (arm1, arm2) pairs in a
# fixed order: 4 per coordinate plane, planes xy, xz, yz.
ORIENTATIONS: tuple[tuple[Vector, Vector], ...] = tuple(
    (a, b)
    for i, a in enumerate(DIRECTIONS)
    for b in DIRECTIONS[i + 1:]
    if a[0] * b[0] + a[1] * b[1] + a[2] * b[2] == 0
)


def add(c: Sequence[int], v: Sequence[int]) -> Cell:
    return (c[0] + v[0], c[1] + v[1], c[2] + v[2])


def direction_name(v: Vector) -> str:
    axis = next(i for i in range(3) if v[i])
    return ("+" if v[axis] > 0 else "-") + AXIS_NAMES[axis]


def parse_direction(name: str) -> Vector:
    sign = {"+": 1, "-": -1}[name[0]]
    axis = AXIS_NAMES.index(name[1])
    return tuple(sign if i == axis else 0 for i in range(3))  # type: ignore[return-value]


def _is_unit(v: Sequence[int]) -> bool:
    return sorted(abs(t) for t in v) == [0, 0, 1]


def _axis(v: Vector) -> int:
    return next(i for i in range(3) if v[i])


@dataclass(frozen=True, order=True)
class TrominoPlacement:
    """An L-tromino: ``corner`` plus its neighbours along two distinct axes.

    The arms are stored sorted, so two placements compare equal exactly when
    they cover the same cells.
    """

    corner: Cell
    arm1: Vector
    arm2: Vector

    def __post_init__(self) -> None:
        if not (_is_unit(self.arm1) and _is_unit(self.arm2)):
            raise ValueError(f"arms must be unit axis vectors: {self.arm1}, {self.arm2}")
        if _axis(self.arm1) == _axis(self.arm2):
            raise ValueError("tromino arms must lie along distinct axes")
        if self.arm2 < self.arm1:
            a1, a2 = self.arm2, self.arm1
            object.__setattr__(self, "arm1", a1)
            object.__setattr__(self, "arm2", a2)

    @property
    def cells(self) -> tuple[Cell, Cell, Cell]:
        return (self.corner, add(self.corner, self.arm1), add(self.corner, self.arm2))

    @classmethod
    def from_cells(cls, cells: Iterable[Sequence[int]]) -> "TrominoPlacement":
        cs = [tuple(c) for c in cells]
        if len(cs) != 3 or len(set(cs)) != 3:
            raise ValueError(f"a tromino needs three distinct cells, got {cs}")
        for i, c in enumerate(cs):
            others = [d for j, d in enumerate(cs) if j != i]
            arms = [tuple(d[k] - c[k] for k in range(3)) for d in others]
            if all(_is_unit(a) for a in arms) and _axis(arms[0]) != _axis(arms[1]):
                return cls(c, arms[0], arms[1])  # type: ignore[arg-type]
        raise ValueError(f"cells {cs} do not form an L-tromino")

    def translated(self, v: Sequence[int]) -> "TrominoPlacement":
        return TrominoPlacement(add(self.corner, v), self.arm1, self.arm2)


def cells_of(p: TrominoPlacement) -> frozenset[Cell]:
    return frozenset(p.cells)


def is_tromino(cells: Sequence[Sequence[int]]) -> bool:
    try:
        TrominoPlacement.from_cells(cells)
    except (ValueError, TypeError):
        return False
    return True


@dataclass(frozen=True)
class BoxRegion:
    origin: Cell
    extent: tuple[int, int, int]

    def __post_init__(self) -> None:
        if any(e <= 0 for e in self.extent):
            raise ValueError(f"box extent must be positive, got {self.extent}")

    @property
    def volume(self) -> int:
        dx, dy, dz = self.extent
        return dx * dy * dz

    @property
    def stop(self) -> Cell:
        return add(self.origin, self.extent)

    def __contains__(self, c: object) -> bool:
        return all(o <= t < o + e for t, o, e in zip(c, self.origin, self.extent))  # type: ignore[arg-type]

    def cells(self) -> Iterator[Cell]:
        (x0, y0, z0), (dx, dy, dz) = self.origin, self.extent
        for x in range(x0, x0 + dx):
            for y in range(y0, y0 + dy):
                for z in range(z0, z0 + dz):
                    yield (x, y, z)

    @classmethod
    def from_bounds(cls, lo: Sequence[int], hi: Sequence[int]) -> "BoxRegion":
        """Half-open bounds ``lo <= c < hi``."""
        return cls(tuple(lo), tuple(h - l for l, h in zip(lo, hi)))  # type: ignore[arg-type]


def required_deficiencies(n: int) -> int:
    return (n ** 3) % 3


@dataclass(frozen=True)
class Instance:
    """A side-``n`` cube with 0, 1 or 2 removed cells (as ``n**3 mod 3`` dictates)."""

    n: int
    deficiencies: frozenset[Cell] = frozenset()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InstanceError(f"side length must be >= 1, got {self.n}")
        defs = frozenset(tuple(c) for c in self.deficiencies)
        object.__setattr__(self, "deficiencies", defs)
        for c in defs:
            if len(c) != 3 or not all(isinstance(t, int) and 0 <= t < self.n for t in c):
                raise InstanceError(f"deficiency {c} lies outside the cube of side {self.n}")
        need = required_deficiencies(self.n)
        if len(defs) != need:
            raise InstanceError(
                f"side {self.n} needs exactly {need} "
                f"{'deficiency' if need == 1 else 'deficiencies'} "
                f"(n^3 = {self.n ** 3} = {need} mod 3), got {len(defs)}"
            )

    @property
    def sorted_deficiencies(self) -> tuple[Cell, ...]:
        return tuple(sorted(self.deficiencies))


class InstanceError(ValueError):
    """The deficiency count or positions violate the instance invariants."""


@dataclass(frozen=True)
class Tiling:
    instance: Instance
    placements: tuple[TrominoPlacement, ...]
    trace: tuple[tuple[int, str], ...] = field(default=(), compare=False)


# ---------------------------------------------------------------------------
# Symmetries


@dataclass(frozen=True)
class Isometry:
    """``out[i] = signs[i] * c[perm[i]] + shift[i]``."""

    perm: tuple[int, int, int] = (0, 1, 2)
    signs: tuple[int, int, int] = (1, 1, 1)
    shift: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self) -> None:
        if sorted(self.perm) != [0, 1, 2]:
            raise ValueError(f"not a permutation of axes: {self.perm}")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"signs must be +1 or -1: {self.signs}")

    @classmethod
    def of_cube(cls, perm: Sequence[int], signs: Sequence[int], n: int) -> "Isometry":
        """The symmetry with this linear part that maps ``[0, n)^3`` onto itself."""
        return cls(tuple(perm), tuple(signs), tuple(0 if s > 0 else n - 1 for s in signs))  # type: ignore[arg-type]

    @classmethod
    def rotation_z(cls, n: int) -> "Isometry":
        """Quarter turn about the z axis, counterclockwise seen from +z: (x, y) -> (n-1-y, x)."""
        return cls((1, 0, 2), (-1, 1, 1), (n - 1, 0, 0))

    @classmethod
    def translation(cls, v: Sequence[int]) -> "Isometry":
        return cls(shift=tuple(v))  # type: ignore[arg-type]

    @property
    def is_identity(self) -> bool:
        return self == Isometry()

    def linear(self, v: Sequence[int]) -> Vector:
        p, s = self.perm, self.signs
        return (s[0] * v[p[0]], s[1] * v[p[1]], s[2] * v[p[2]])

    def cell(self, c: Sequence[int]) -> Cell:
        p, s, t = self.perm, self.signs, self.shift
        return (s[0] * c[p[0]] + t[0], s[1] * c[p[1]] + t[1], s[2] * c[p[2]] + t[2])

    def placement(self, q: TrominoPlacement) -> TrominoPlacement:
        return TrominoPlacement(self.cell(q.corner), self.linear(q.arm1), self.linear(q.arm2))

    def compose(self, other: "Isometry") -> "Isometry":
        """``self.compose(other)(c) == self(other(c))``."""
        perm = tuple(other.perm[self.perm[i]] for i in range(3))
        signs = tuple(self.signs[i] * other.signs[self.perm[i]] for i in range(3))
        shift = add(self.linear(other.shift), self.shift)
        return Isometry(perm, signs, shift)  # type: ignore[arg-type]

    def inverse(self) -> "Isometry":
        inv = [0, 0, 0]
        for i, p in enumerate(self.perm):
            inv[p] = i
        signs = tuple(self.signs[inv[j]] for j in range(3))
        shift = tuple(-signs[j] * self.shift[inv[j]] for j in range(3))
        return Isometry(tuple(inv), signs, shift)  # type: ignore[arg-type]

    def __call__(self, obj):
        return apply(self, obj)


LINEAR_SYMMETRIES: tuple[tuple[tuple[int, int, int], tuple[int, int, int]], ...] = tuple(
    (perm, signs)
    for perm in itertools.permutations(range(3))
    for signs in itertools.product((1, -1), repeat=3)
)


def cube_symmetries(n: int) -> list[Isometry]:
    """All 48 symmetries of ``[0, n)^3``, identity first."""
    return [Isometry.of_cube(p, s, n) for p, s in LINEAR_SYMMETRIES]


def apply(iso: Isometry, obj):
    """Geometric image of a cell, placement, instance or tiling.

    Instances and tilings are mapped as-is; the caller picks an isometry that
    keeps the cube in place (see :meth:`Isometry.of_cube`).
    """
    if isinstance(obj, TrominoPlacement):
        return iso.placement(obj)
    if isinstance(obj, Instance):
        return Instance(obj.n, frozenset(iso.cell(c) for c in obj.deficiencies))
    if isinstance(obj, Tiling):
        return Tiling(
            apply(iso, obj.instance),
            tuple(iso.placement(p) for p in obj.placements),
            obj.trace,
        )
    if isinstance(obj, tuple) and len(obj) == 3:
        return iso.cell(obj)
    raise TypeError(f"cannot apply an isometry to {type(obj).__name__}")


def canonicalize(inst: Instance) -> tuple[Instance, Isometry]:
    """Lexicographically least image of ``inst`` under the cube group.

    Returns ``(canonical, iso)`` with ``apply(iso, inst) == canonical``; the
    first minimising symmetry in :data:`LINEAR_SYMMETRIES` order wins, so a
    canonical instance maps to itself by the identity.
    """
    best_key = None
    best_iso = None
    for iso in cube_symmetries(inst.n):
        key = tuple(sorted(iso.cell(c) for c in inst.deficiencies))
        if best_key is None or key < best_key:
            best_key, best_iso = key, iso
    assert best_iso is not None
    return Instance(inst.n, frozenset(best_key)), best_iso


def corner_subcube(n: int, m: int, corner: Sequence[int]) -> BoxRegion:
    """Side-``m`` subcube of ``[0, n)^3`` sharing the corner given by bits (0 = low side)."""
    return BoxRegion(tuple((n - m) * b for b in corner), (m, m, m))  # type: ignore[arg-type]


CORNERS: tuple[tuple[int, int, int], ...] = tuple(itertools.product((0, 1), repeat=3))

"""JSON documents for instances and tilings, plus the text renderers.

Instance document::

    {"n": 4, "deficiencies": [[0, 0, 0]]}

Tiling document::

    {"instance": {...},
     "pieces": [{"id": 1, "cells": [[x, y, z], [x, y, z], [x, y, z]]}, ...],
     "metadata": {"version": "1.0.0", "trace": [[4, "base-search"]]}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from . import __version__
from .geometry import Cell, Instance, InstanceError, Tiling, TrominoPlacement

DEFICIENCY_MARK = "·"


class DocumentError(ValueError):
    """A document that does not parse; ``path`` names the offending field."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def _cell(value: Any, path: str) -> Cell:
    if (not isinstance(value, list) or len(value) != 3
            or not all(isinstance(t, int) and not isinstance(t, bool) and t >= 0 for t in value)):
        raise DocumentError(path, f"expected [x, y, z] of non-negative integers, got {value!r}")
    return tuple(value)  # type: ignore[return-value]


def _field(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise DocumentError(path, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise DocumentError(f"{path}.{key}" if path else key, "missing field")
    return obj[key]


@dataclass(frozen=True)
class InstanceDocument:
    n: int
    deficiencies: tuple[Cell, ...]

    @classmethod
    def of(cls, inst: Instance) -> "InstanceDocument":
        return cls(inst.n, inst.sorted_deficiencies)

    def to_instance(self) -> Instance:
        return Instance(self.n, frozenset(self.deficiencies))

    def to_json(self) -> dict:
        return {"n": self.n, "deficiencies": [list(c) for c in self.deficiencies]}

    @classmethod
    def from_json(cls, obj: Any, path: str = "") -> "InstanceDocument":
        n = _field(obj, "n", path)
        if not isinstance(n, int) or isinstance(n, bool):
            raise DocumentError(f"{path}.n" if path else "n", f"expected an integer, got {n!r}")
        raw = _field(obj, "deficiencies", path)
        dpath = f"{path}.deficiencies" if path else "deficiencies"
        if not isinstance(raw, list):
            raise DocumentError(dpath, "expected a list")
        defs = tuple(_cell(c, f"{dpath}[{i}]") for i, c in enumerate(raw))
        if len(set(defs)) != len(defs):
            raise InstanceError("duplicate deficiency cells")
        doc = cls(n, defs)
        doc.to_instance()  # invariant check
        return doc


@dataclass(frozen=True)
class TilingDocument:
    instance: InstanceDocument
    pieces: tuple[tuple[Cell, Cell, Cell], ...]
    version: str = __version__
    trace: tuple[tuple[int, str], ...] = field(default=())

    @classmethod
    def of(cls, tiling: Tiling) -> "TilingDocument":
        return cls(InstanceDocument.of(tiling.instance),
                   tuple(p.cells for p in tiling.placements), __version__, tiling.trace)

    def to_json(self) -> dict:
        return {
            "instance": self.instance.to_json(),
            "pieces": [{"id": i, "cells": [list(c) for c in cells]}
                       for i, cells in enumerate(self.pieces, start=1)],
            "metadata": {"version": self.version, "trace": [list(t) for t in self.trace]},
        }

    @classmethod
    def from_json(cls, obj: Any) -> "TilingDocument":
        inst = InstanceDocument.from_json(_field(obj, "instance", ""), "instance")
        raw = _field(obj, "pieces", "")
        if not isinstance(raw, list):
            raise DocumentError("pieces", "expected a list")
        pieces = []
        for i, piece in enumerate(raw):
            path = f"pieces[{i}]"
            pid = _field(piece, "id", path)
            if pid != i + 1:
                raise DocumentError(f"{path}.id", f"ids must run 1..k in order, expected {i + 1}, got {pid!r}")
            cells = _field(piece, "cells", path)
            if not isinstance(cells, list) or len(cells) != 3:
                raise DocumentError(f"{path}.cells", "expected three cells")
            pieces.append(tuple(_cell(c, f"{path}.cells[{j}]") for j, c in enumerate(cells)))
        meta = obj.get("metadata", {})
        if not isinstance(meta, dict):
            raise DocumentError("metadata", "expected an object")
        version = meta.get("version", "")
        trace_raw = meta.get("trace", [])
        try:
            trace = tuple((int(k), str(label)) for k, label in trace_raw)
        except (TypeError, ValueError):
            raise DocumentError("metadata.trace", "expected a list of [n, label] pairs") from None
        return cls(inst, tuple(pieces), str(version), trace)  # type: ignore[arg-type]

    def placements(self) -> list[TrominoPlacement]:
        """Pieces as placements; raises ``DocumentError`` on a non-tromino."""
        out = []
        for i, cells in enumerate(self.pieces):
            try:
                out.append(TrominoPlacement.from_cells(cells))
            except ValueError as exc:
                raise DocumentError(f"pieces[{i}].cells", str(exc)) from None
        return out


def loads(text: str) -> Any:
    """``json.loads`` with the line and column in the error."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=None, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# Renderers


def render_layers(n: int, deficiencies: Iterable[Cell], pieces: Iterable[Iterable[Cell]]) -> str:
    """One grid per z from 0 up; rows run y from ``n - 1`` down to 0, columns x left to right.

    Cells show their 1-based piece id, right aligned; removed cells show ``·``.
    """
    owner: dict[Cell, int] = {}
    count = 0
    for i, cells in enumerate(pieces, start=1):
        count = i
        for c in cells:
            owner[tuple(c)] = i  # type: ignore[index]
    holes = set(deficiencies)
    width = max(len(str(count)), 1)
    blocks = []
    for z in range(n):
        rows = [f"z={z}"]
        for y in range(n - 1, -1, -1):
            row = []
            for x in range(n):
                c = (x, y, z)
                if c in holes:
                    row.append(DEFICIENCY_MARK.rjust(width))
                else:
                    row.append(str(owner.get(c, "?")).rjust(width))
            rows.append(" ".join(row))
        blocks.append("\n".join(rows))
    return "\n\n".join(blocks) + "\n"


PALETTE = (
    (0.894, 0.102, 0.110), (0.216, 0.494, 0.722), (0.302, 0.686, 0.290),
    (0.596, 0.306, 0.639), (1.000, 0.498, 0.000), (1.000, 1.000, 0.200),
    (0.651, 0.337, 0.157), (0.969, 0.506, 0.749),
)

_CUBE_FACES = ((1, 2, 4, 3), (5, 7, 8, 6), (1, 5, 6, 2), (3, 4, 8, 7), (1, 3, 7, 5), (2, 6, 8, 4))


def render_obj(pieces: Iterable[Iterable[Cell]], mtllib: str = "tromino_palette.mtl") -> str:
    """Wavefront OBJ: one group per piece made of unit cubes, material ``color_<id mod 8>``."""
    lines = [f"mtllib {mtllib}"]
    base = 0
    for i, cells in enumerate(pieces, start=1):
        lines.append(f"g piece_{i}")
        lines.append(f"usemtl color_{i % len(PALETTE)}")
        for x, y, z in cells:
            for dx in (0, 1):
                for dy in (0, 1):
                    for dz in (0, 1):
                        lines.append(f"v {x + dx} {y + dy} {z + dz}")
            for face in _CUBE_FACES:
                lines.append("f " + " ".join(str(base + k) for k in face))
            base += 8
    return "\n".join(lines) + "\n"


def render_mtl() -> str:
    """Material library matching :func:`render_obj`."""
    out = []
    for k, (r, g, b) in enumerate(PALETTE):
        out += [f"newmtl color_{k}", f"Kd {r:.3f} {g:.3f} {b:.3f}", ""]
    return "\n".join(out)

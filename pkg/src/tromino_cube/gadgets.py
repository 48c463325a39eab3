"""Exhaustive backtracking tiler for small regions, with optional protrusions.

A gadget problem asks for trominoes that cover ``region`` exactly, may also
occupy cells of ``protrusion_sites`` and must use exactly
``protrusion_budget`` of them. Every tromino keeps at least one cell in the
region.

The search works on bitmasks over a padded bounding box, indexed x-major so
that the lowest set bit is the lexicographically least cell. It always
branches on the least uncovered region cell,
and cuts any branch leaving a connected component of uncovered cells whose
size is not a multiple of three and which cannot reach a free protrusion site.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol

from .geometry import (
    LINEAR_SYMMETRIES,
    ORIENTATIONS,
    Cell,
    Isometry,
    TrominoPlacement,
    add,
)

log = logging.getLogger(__name__)


class GadgetError(ValueError):
    """A malformed gadget problem (as opposed to one without a solution)."""


@dataclass(frozen=True)
class GadgetProblem:
    region: frozenset[Cell]
    forbidden: frozenset[Cell] = frozenset()
    protrusion_sites: frozenset[Cell] = frozenset()
    protrusion_budget: int = 0

    def __post_init__(self) -> None:
        for name in ("region", "forbidden", "protrusion_sites"):
            object.__setattr__(self, name, frozenset(tuple(c) for c in getattr(self, name)))
        if self.region & self.forbidden or self.region & self.protrusion_sites \
                or self.forbidden & self.protrusion_sites:
            raise GadgetError("region, forbidden and protrusion_sites must be pairwise disjoint")
        if self.protrusion_budget < 0 or self.protrusion_budget > len(self.protrusion_sites):
            raise GadgetError(
                f"protrusion budget {self.protrusion_budget} not within "
                f"0..{len(self.protrusion_sites)} available sites"
            )
        if (len(self.region) + self.protrusion_budget) % 3:
            raise GadgetError(
                f"{len(self.region)} region cells + {self.protrusion_budget} protrusions "
                "is not a multiple of 3"
            )


@dataclass(frozen=True)
class GadgetSolution:
    placements: tuple[TrominoPlacement, ...]
    used: frozenset[Cell]

    def transformed(self, iso: Isometry) -> "GadgetSolution":
        return GadgetSolution(
            tuple(iso.placement(p) for p in self.placements),
            frozenset(iso.cell(c) for c in self.used),
        )


class _Search:
    def __init__(self, prob: GadgetProblem) -> None:
        self.prob = prob
        cells = prob.region | prob.protrusion_sites
        self.lo = tuple(min(c[i] for c in cells) for i in range(3))
        hi = tuple(max(c[i] for c in cells) for i in range(3))
        # One cell of padding on every side so shifted masks never wrap.
        self.sz = hi[2] - self.lo[2] + 3
        self.sy = (hi[1] - self.lo[1] + 3) * self.sz
        self.cell_at: dict[int, Cell] = {}

        self.region_mask = self._mask(prob.region)
        self.site_mask = self._mask(prob.protrusion_sites)
        allowed = prob.region | prob.protrusion_sites

        # candidates[bit] -> placements containing that region cell
        self.candidates: dict[int, list[tuple[int, int, int, TrominoPlacement]]] = {}
        seen: set[int] = set()
        for corner in sorted(allowed):
            for arm1, arm2 in ORIENTATIONS:
                cs = (corner, add(corner, arm1), add(corner, arm2))
                if not all(c in allowed for c in cs):
                    continue
                m = self._mask(cs)
                if m in seen:
                    continue
                rm = m & self.region_mask
                if not rm:
                    continue
                seen.add(m)
                entry = (rm, m & self.site_mask, (m & self.site_mask).bit_count(),
                         TrominoPlacement(corner, arm1, arm2))
                for c in cs:
                    if c in prob.region:
                        self.candidates.setdefault(self._bit(c), []).append(entry)
        for lst in self.candidates.values():
            lst.sort(key=lambda e: (e[0] | e[1]))

    def _index(self, c: Cell) -> int:
        return ((c[0] - self.lo[0] + 1) * self.sy + (c[1] - self.lo[1] + 1) * self.sz
                + (c[2] - self.lo[2] + 1))

    def _bit(self, c: Cell) -> int:
        i = self._index(c)
        self.cell_at[i] = c
        return 1 << i

    def _mask(self, cells: Iterable[Cell]) -> int:
        m = 0
        for c in cells:
            m |= self._bit(c)
        return m

    def _grow(self, m: int) -> int:
        sy, sz = self.sy, self.sz
        return m | m << 1 | m >> 1 | m << sz | m >> sz | m << sy | m >> sy

    def _feasible(self, uncovered: int, free_sites: int, exhausted: bool) -> bool:
        while uncovered:
            comp = uncovered & -uncovered
            while True:
                grown = self._grow(comp) & uncovered
                if grown == comp:
                    break
                comp = grown
            if comp.bit_count() % 3:
                if exhausted or not (self._grow(comp) & free_sites):
                    return False
            uncovered ^= comp
        return True

    def solutions(self) -> Iterator[GadgetSolution]:
        budget = self.prob.protrusion_budget
        chosen: list[TrominoPlacement] = []
        used_sites: list[int] = []

        def dfs(uncovered: int, free_sites: int, used: int) -> Iterator[GadgetSolution]:
            if not uncovered:
                if used == budget:
                    used_cells = frozenset(
                        self.cell_at[(m & -m).bit_length() - 1]
                        for sm in used_sites for m in _bits(sm)
                    )
                    yield GadgetSolution(tuple(chosen), used_cells)
                return
            low = uncovered & -uncovered
            for rm, sm, pc, placement in self.candidates.get(low, ()):
                if rm & ~uncovered or sm & ~free_sites or used + pc > budget:
                    continue
                nu, nf, nused = uncovered & ~rm, free_sites & ~sm, used + pc
                if not self._feasible(nu, nf, nused == budget):
                    continue
                chosen.append(placement)
                used_sites.append(sm)
                yield from dfs(nu, nf, nused)
                chosen.pop()
                used_sites.pop()

        if self._feasible(self.region_mask, self.site_mask, budget == 0):
            yield from dfs(self.region_mask, self.site_mask, 0)


def _bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low
        m ^= low


# ---------------------------------------------------------------------------
# Witness cache


class WitnessStore(Protocol):
    """Optional persistent backing for :class:`WitnessCache`."""

    def get(self, key: tuple) -> object:
        """Stored value, or :data:`MISSING`."""

    def put(self, key: tuple, value: GadgetSolution | None) -> None: ...


MISSING = ...


class WitnessCache:
    """Memo of solved canonical gadget problems; inserts are idempotent."""

    def __init__(self, store: WitnessStore | None = None) -> None:
        self._data: dict[tuple, GadgetSolution | None] = {}
        self._lock = threading.Lock()
        self.store = store
        self.hits = 0
        self.misses = 0

    def get(self, key: tuple):
        with self._lock:
            if key in self._data:
                self.hits += 1
                return self._data[key]
        if self.store is not None:
            value = self.store.get(key)
            if value is not MISSING:
                with self._lock:
                    self._data.setdefault(key, value)
                    self.hits += 1
                return value
        with self._lock:
            self.misses += 1
        return MISSING

    def put(self, key: tuple, value: GadgetSolution | None) -> None:
        with self._lock:
            self._data.setdefault(key, value)
        if self.store is not None:
            self.store.put(key, value)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0

    def __len__(self) -> int:
        return len(self._data)


DEFAULT_CACHE = WitnessCache()


def canonical_form(prob: GadgetProblem) -> tuple[tuple, Isometry]:
    """Translation- and symmetry-reduced key of ``prob`` and the isometry reaching it.

    ``forbidden`` does not influence the search and is left out of the key.
    """
    everything = prob.region | prob.protrusion_sites
    best_key = None
    best_iso = None
    for perm, signs in LINEAR_SYMMETRIES:
        lin = Isometry(perm, signs)
        imgs = [lin.cell(c) for c in everything]
        lo = tuple(min(c[i] for c in imgs) for i in range(3))
        iso = Isometry(perm, signs, (-lo[0], -lo[1], -lo[2]))
        key = (
            tuple(sorted(iso.cell(c) for c in prob.region)),
            tuple(sorted(iso.cell(c) for c in prob.protrusion_sites)),
            prob.protrusion_budget,
        )
        if best_key is None or key < best_key:
            best_key, best_iso = key, iso
    assert best_iso is not None
    return best_key, best_iso


def problem_from_key(key: tuple) -> GadgetProblem:
    region, sites, budget = key
    return GadgetProblem(frozenset(region), frozenset(), frozenset(sites), budget)


def solve_gadget(
    prob: GadgetProblem, cache: WitnessCache | None = DEFAULT_CACHE
) -> GadgetSolution | None:
    """First solution in search order, or ``None`` if the problem has none.

    With a cache, the canonical representative of the problem's symmetry class
    is searched and the answer transported back, so the result does not depend
    on which member of the class was asked first.
    """
    if not prob.region:
        return GadgetSolution((), frozenset()) if prob.protrusion_budget == 0 else None
    if cache is None:
        return next(_Search(prob).solutions(), None)
    key, iso = canonical_form(prob)
    found = cache.get(key)
    if found is MISSING:
        found = next(_Search(problem_from_key(key)).solutions(), None)
        log.debug("searched gadget with %d cells: %s", len(prob.region),
                  "solved" if found else "no solution")
        cache.put(key, found)
    if found is None:
        return None
    return found.transformed(iso.inverse())


def enumerate_gadget(prob: GadgetProblem, limit: int | None = None) -> list[GadgetSolution]:
    """All solutions (up to ``limit``) in deterministic search order; never cached."""
    if not prob.region:
        return [GadgetSolution((), frozenset())] if prob.protrusion_budget == 0 else []
    out: list[GadgetSolution] = []
    for sol in _Search(prob).solutions():
        out.append(sol)
        if limit is not None and len(out) >= limit:
            break
    return out

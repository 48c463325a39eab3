"""On-disk witness store: one JSON file per canonical gadget problem.

Files are named by the SHA-256 of the problem key and carry a checksum of
their payload. Anything unreadable, mismatched or failing re-verification is
logged and treated as absent.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from .gadgets import MISSING, GadgetSolution
from .geometry import TrominoPlacement
from .verify import verify_region

log = logging.getLogger(__name__)

CACHE_ENV = "TROMINO_CUBE_CACHE_DIR"


def _key_json(key: tuple) -> list:
    region, sites, budget = key
    return [[list(c) for c in region], [list(c) for c in sites], budget]


def _digest(payload: object) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


class DiskWitnessStore:
    def __init__(self, directory: str | os.PathLike) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.rejected = 0

    def path_for(self, key: tuple) -> Path:
        return self.directory / f"{_digest(_key_json(key))}.json"

    def get(self, key: tuple):
        path = self.path_for(key)
        if not path.exists():
            return MISSING
        try:
            doc = json.loads(path.read_text())
            payload = {"key": doc["key"], "solution": doc["solution"]}
            if doc["checksum"] != _digest(payload) or doc["key"] != _key_json(key):
                raise ValueError("checksum or key mismatch")
            value = self._decode(key, doc["solution"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            log.warning("ignoring corrupt witness file %s: %s", path.name, exc)
            self.rejected += 1
            return MISSING
        return value

    @staticmethod
    def _decode(key: tuple, raw) -> GadgetSolution | None:
        if raw is None:
            return None
        region, sites, budget = key
        placements = tuple(TrominoPlacement.from_cells(p) for p in raw["placements"])
        used = frozenset(tuple(c) for c in raw["used"])
        if len(used) != budget or not used <= set(sites):
            raise ValueError("protrusions do not match the problem")
        if not verify_region(set(region) | used, placements).valid:
            raise ValueError("stored witness does not tile its region")
        return GadgetSolution(placements, used)

    def put(self, key: tuple, value: GadgetSolution | None) -> None:
        solution = None if value is None else {
            "placements": [[list(c) for c in p.cells] for p in value.placements],
            "used": sorted(list(c) for c in value.used),
        }
        payload = {"key": _key_json(key), "solution": solution}
        doc = dict(payload, checksum=_digest(payload))
        path = self.path_for(key)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh)
            os.replace(tmp, path)
        except OSError as exc:
            log.warning("could not write witness file %s: %s", path.name, exc)
            if os.path.exists(tmp):
                os.unlink(tmp)

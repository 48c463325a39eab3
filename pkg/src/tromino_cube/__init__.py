"""Tile any n x n x n cube with L-trominoes, leaving n^3 mod 3 chosen cells uncovered."""

__version__ = "0.1.0"

from .geometry import Instance, InstanceError, Isometry, Tiling, TrominoPlacement  # noqa: E402
from .solver import SolverDefect, solve  # noqa: E402
from .verify import VerificationReport, verify_tiling  # noqa: E402

__all__ = [
    "Instance", "InstanceError", "Isometry", "Tiling", "TrominoPlacement",
    "SolverDefect", "solve", "VerificationReport", "verify_tiling", "__version__",
]

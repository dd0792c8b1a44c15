"""Grid specifications shared by the numeric modules.

Every empirical sup/inf in this package is taken over an explicit, declared grid;
the grid spec travels inside evidence records so reports stay reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GeometricGrid:
    """Geometric grid of ``points`` abscissas from ``start`` to ``stop`` inclusive."""

    start: float
    stop: float
    points: int

    def __post_init__(self):
        if not (self.start > 0 and self.stop > self.start):
            raise ValueError("need 0 < start < stop")
        if self.points < 2:
            raise ValueError("need at least 2 points")

    def values(self) -> np.ndarray:
        return np.geomspace(self.start, self.stop, self.points)

    def tail_start(self) -> int:
        """Index of the first point of the tail half (second half by index)."""
        return self.points // 2

    def tail(self) -> np.ndarray:
        return self.values()[self.tail_start():]

    def to_json(self) -> dict:
        return {"kind": "geometric", "start": self.start, "stop": self.stop,
                "points": self.points}

    @staticmethod
    def from_json(obj: dict) -> "GeometricGrid":
        return GeometricGrid(obj["start"], obj["stop"], obj["points"])


def doubling_gamma_grid(base: float = 4.0, max_doublings: int = 24) -> np.ndarray:
    """Log-abscissa grid gamma_j = base * 2^j, j = 0..max_doublings."""
    return base * np.exp2(np.arange(max_doublings + 1, dtype=float))

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class SystemConfig:
    """Symmetric G-cell, K-user, M x N MIMO interference broadcast channel."""

    G: int
    K: int
    M: int
    N: int

    def __post_init__(self):
        for name in ("G", "K", "M", "N"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.G < 2:
            raise ValueError(f"G must be >= 2, got {self.G}")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.M, self.N)

    def extended(self, m: int) -> "SystemConfig":
        """Spatially extended system with ``m*M`` and ``m*N`` antennas."""
        if m < 1:
            raise ValueError("extension factor must be >= 1")
        return SystemConfig(self.G, self.K, m * self.M, m * self.N)

    def __str__(self):
        return f"G={self.G} K={self.K} M={self.M} N={self.N}"

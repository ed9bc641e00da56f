"""Atomic units for the commuting displacement pair.

The momentum step p0 and position step x0 must enclose one Planck cell,
p0*x0 = 2*pi*hbar, for the two Weyl displacement operators to commute.
Only two of (hbar, x0, p0) are free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class UnitsConfig:
    hbar: float = 1.0
    x0: float = math.sqrt(2.0 * math.pi)
    p0: float = math.sqrt(2.0 * math.pi)

    def __post_init__(self):
        if not (self.hbar > 0 and self.x0 > 0 and self.p0 > 0):
            raise ValueError("hbar, x0, p0 must all be strictly positive")
        target = 2.0 * math.pi * self.hbar
        if abs(self.p0 * self.x0 - target) > 1e-12 * target:
            raise ValueError(
                f"p0*x0 = {self.p0 * self.x0!r} violates p0*x0 = 2*pi*hbar = {target!r}")

    @classmethod
    def from_x0(cls, x0: float, hbar: float = 1.0) -> "UnitsConfig":
        return cls(hbar=hbar, x0=x0, p0=2.0 * math.pi * hbar / x0)

    @classmethod
    def from_p0(cls, p0: float, hbar: float = 1.0) -> "UnitsConfig":
        return cls(hbar=hbar, x0=2.0 * math.pi * hbar / p0, p0=p0)


#: symmetric default, x0 = p0 = sqrt(2*pi*hbar) with hbar = 1
DEFAULT_UNITS = UnitsConfig()

"""Quadratic terminal sliding surface shared by all controllers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError


def sign(value: float) -> float:
    """Signum with sign(0) == 0."""
    if value > 0.0:
        return 1.0
    if value < 0.0:
        return -1.0
    return 0.0


@dataclass(frozen=True)
class SurfaceSpec:
    """Parameters of sigma = x1 + delta * x2 * |x2|.

    The quadratic gain is mass-scaled, ``delta = alpha * m / (K * U)``, i.e.
    alpha divided by the largest commanded acceleration. With that scaling
    alpha = 0.5 is exactly the time-optimal switching parabola of the plant;
    smaller values put the loop into twisting mode.
    """

    alpha: float = 1.2
    u_max: float = 0.8
    mass: float = 0.538
    input_gain: float = 3.28
    reference: float = 0.015

    def __post_init__(self):
        for name in ("alpha", "u_max", "mass", "input_gain"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigError(f"surface.{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.reference):
            raise ConfigError(f"surface.reference must be finite, got {self.reference!r}")

    @property
    def delta(self) -> float:
        return self.alpha * self.mass / (self.input_gain * self.u_max)

    @property
    def max_acceleration(self) -> float:
        return self.input_gain * self.u_max / self.mass

    @property
    def twisting(self) -> bool:
        """True when alpha <= 0.5, where the terminal mode is not guaranteed."""
        return self.alpha <= 0.5


def sigma(x1: float, x2: float, spec: SurfaceSpec) -> float:
    """Sliding variable for position error ``x1`` and velocity ``x2``."""
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise ConfigError(f"non-finite state passed to sigma: ({x1!r}, {x2!r})")
    return x1 + spec.delta * x2 * abs(x2)

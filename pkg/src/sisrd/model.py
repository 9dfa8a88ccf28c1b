"""Core parameter set for the two-compartment epidemic model.

The model tracks a susceptible density u and an infective density v.
Susceptibles are recruited at a constant rate, die at a natural rate,
and become infective through a transmission term lam * u * phi(v); the
infectives recover back into the susceptible pool.  Both compartments
may diffuse in space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class BlowUpError(RuntimeError):
    """Raised when an integration leaves the finite range it should stay in."""


@dataclass(frozen=True)
class ModelParams:
    """Epidemiological constants plus the two diffusion coefficients.

    Attributes:
        Lambda: recruitment rate of susceptibles (births/immigration).
        mu: natural death rate.
        lam: transmission rate multiplying u*phi(v).
        sigma: recovery rate of infectives.
        d1: susceptible diffusivity (0 for the well-mixed model).
        d2: infective diffusivity (0 for the well-mixed model).
    """

    Lambda: float
    mu: float
    lam: float
    sigma: float
    d1: float = 0.0
    d2: float = 0.0

    def __post_init__(self):
        for name in ("Lambda", "mu", "lam", "sigma"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ValueError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        for name in ("d1", "d2"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ValueError(f"{name} must be a finite number, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")

    @property
    def sigma0(self) -> float:
        """min(sigma, mu), the decay rate bounding the total population."""
        return min(self.sigma, self.mu)

    @property
    def population_cap(self) -> float:
        """Lambda / sigma0, the ceiling of the attracting region for u + v."""
        return self.Lambda / self.sigma0

    def disease_free(self) -> tuple[float, float]:
        """The infection-free steady state (Lambda/mu, 0)."""
        return (self.Lambda / self.mu, 0.0)

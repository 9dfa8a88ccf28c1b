"""Incidence functions and their admissibility checks.

The transmission term of the model is lam * u * phi(v), where phi maps
the infective density to a per-susceptible infection pressure.  An
admissible phi vanishes at the origin, has a positive finite initial
slope, and is sublinear in the sense

    0 < v * phi'(v) <= phi(v)   for every v > 0,

which forces phi(v)/v to be non-increasing.  Every stability statement
downstream rests on these properties, so they are checkable here.

Built-in families:

* ``LinearIncidence``          phi(v) = alpha * v
* ``SaturatedIncidence``       phi(v) = alpha * v / (1 + k * v)
* ``HalfSaturationIncidence``  phi(v) = k * v / (1 + v / alpha)

``CustomIncidence`` wraps arbitrary callables; because finite
differencing near zero is unreliable, the initial slope must then be
supplied explicitly.

All incidence objects are frozen dataclasses: immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

# Inequalities below hold exactly in real arithmetic for the built-in
# families, so the slack only has to absorb floating-point rounding.
REL_TOL = 1e-12
ABS_TOL = 1e-14


def _check_domain(v):
    if np.any(np.asarray(v) < 0):
        raise ValueError("incidence functions are defined for v >= 0 only")


class Incidence:
    """Base class; subclasses provide phi, dphi and slope0."""

    def phi(self, v):
        """Infection pressure phi(v).  Accepts scalars or numpy arrays."""
        raise NotImplementedError

    def dphi(self, v):
        """Derivative phi'(v).  Accepts scalars or numpy arrays."""
        raise NotImplementedError


@dataclass(frozen=True)
class LinearIncidence(Incidence):
    """phi(v) = alpha * v (mass-action transmission)."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    def phi(self, v):
        _check_domain(v)
        return self.alpha * v

    def dphi(self, v):
        _check_domain(v)
        return self.alpha + 0.0 * v

    @property
    def slope0(self) -> float:
        return self.alpha


@dataclass(frozen=True)
class SaturatedIncidence(Incidence):
    """phi(v) = alpha * v / (1 + k * v), saturating at alpha/k."""

    alpha: float
    k: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ValueError(f"k must be positive, got {self.k}")

    def phi(self, v):
        _check_domain(v)
        return self.alpha * v / (1.0 + self.k * v)

    def dphi(self, v):
        _check_domain(v)
        return self.alpha / (1.0 + self.k * v) ** 2

    @property
    def slope0(self) -> float:
        return self.alpha


@dataclass(frozen=True)
class HalfSaturationIncidence(Incidence):
    """phi(v) = k * v / (1 + v/alpha); alpha is the half-saturation density."""

    k: float
    alpha: float

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ValueError(f"k must be positive, got {self.k}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    def phi(self, v):
        _check_domain(v)
        return self.k * v / (1.0 + v / self.alpha)

    def dphi(self, v):
        _check_domain(v)
        return self.k / (1.0 + v / self.alpha) ** 2

    @property
    def slope0(self) -> float:
        return self.k


@dataclass(frozen=True)
class CustomIncidence(Incidence):
    """User-supplied incidence.

    ``slope0`` (the value of phi'(0)) must be given explicitly rather
    than estimated by finite differences: cancellation near zero would
    contaminate the reproduction number.  Admissibility of the callables
    is not assumed; run :func:`check_admissible` to verify it.
    """

    phi_fn: Callable
    dphi_fn: Callable
    slope0: float

    def __post_init__(self):
        if not math.isfinite(self.slope0):
            raise ValueError(f"slope0 must be finite, got {self.slope0}")

    def phi(self, v):
        _check_domain(v)
        return self.phi_fn(v)

    def dphi(self, v):
        _check_domain(v)
        return self.dphi_fn(v)


def phi_callable(spec: Incidence) -> Callable:
    """Unchecked phi for integrator hot loops.

    The returned closure skips domain validation so that intermediate
    integration stages, which may undershoot zero by rounding error, do
    not raise.
    """
    if isinstance(spec, LinearIncidence):
        a = spec.alpha
        return lambda v: a * v
    if isinstance(spec, SaturatedIncidence):
        a, k = spec.alpha, spec.k
        return lambda v: a * v / (1.0 + k * v)
    if isinstance(spec, HalfSaturationIncidence):
        k, a = spec.k, spec.alpha
        return lambda v: k * v / (1.0 + v / a)
    return spec.phi_fn


def dphi_callable(spec: Incidence) -> Callable:
    """Unchecked phi' companion to :func:`phi_callable`."""
    if isinstance(spec, LinearIncidence):
        a = spec.alpha
        return lambda v: a + 0.0 * v
    if isinstance(spec, SaturatedIncidence):
        a, k = spec.alpha, spec.k
        return lambda v: a / (1.0 + k * v) ** 2
    if isinstance(spec, HalfSaturationIncidence):
        k, a = spec.k, spec.alpha
        return lambda v: k / (1.0 + v / a) ** 2
    return spec.dphi_fn


@dataclass(frozen=True)
class AdmissibilityViolation:
    """First sample at which one structural condition failed."""

    check: str
    v: float
    lhs: float
    rhs: float


@dataclass(frozen=True)
class AdmissibilityReport:
    passed: bool
    n_samples: int
    v_max: float
    violations: tuple[AdmissibilityViolation, ...]

    @property
    def first_violation(self) -> Optional[AdmissibilityViolation]:
        return self.violations[0] if self.violations else None


def check_admissible(spec: Incidence, v_max: float, n_samples: int = 1000) -> AdmissibilityReport:
    """Verify the structural incidence conditions on a sampled grid.

    Samples v on a logarithmic grid in (0, v_max] and checks, at every
    sample and within REL_TOL / ABS_TOL slack:

    * ``slope_positive``       0 < v * phi'(v)
    * ``sublinear``            v * phi'(v) <= phi(v)
    * ``slope0_dominates``     0 < phi(v)/v <= phi'(0)
    * ``exponential_envelope`` phi(v) < phi'(0) * exp(v)

    Violations are reported, never raised; the ``Custom`` variant admits
    arbitrary callables, so sampling is the only uniform mechanism.
    """
    if not (v_max > 0):
        raise ValueError(f"v_max must be positive, got {v_max}")
    if n_samples < 2:
        raise ValueError(f"n_samples must be at least 2, got {n_samples}")

    v = np.geomspace(v_max * 1e-12, v_max, n_samples)
    phi = np.asarray(spec.phi(v), dtype=float)
    dphi = np.asarray(spec.dphi(v), dtype=float)
    slope0 = spec.slope0

    violations = []

    def scan(check: str, ok: np.ndarray, lhs: np.ndarray, rhs: np.ndarray):
        bad = np.nonzero(~ok)[0]
        if bad.size:
            i = int(bad[0])
            violations.append(
                AdmissibilityViolation(check, float(v[i]), float(lhs[i]), float(rhs[i]))
            )

    vdphi = v * dphi
    slack = REL_TOL * np.abs(phi) + ABS_TOL
    scan("slope_positive", vdphi > 0, vdphi, np.zeros_like(v))
    scan("sublinear", vdphi <= phi + slack, vdphi, phi)

    ratio = phi / v
    slope_slack = REL_TOL * abs(slope0) + ABS_TOL
    scan("slope0_dominates", (ratio > 0) & (ratio <= slope0 + slope_slack), ratio, slope0 + 0.0 * v)

    # Compared in log space so that exp(v) cannot overflow for large v_max.
    with np.errstate(divide="ignore", invalid="ignore"):
        log_phi = np.where(phi > 0, np.log(np.where(phi > 0, phi, 1.0)), -np.inf)
    if slope0 > 0:
        envelope_ok = log_phi < math.log(slope0) + v + REL_TOL
    else:
        envelope_ok = phi < 0  # no positive phi can sit under a zero envelope
    scan("exponential_envelope", envelope_ok, phi, slope0 * np.where(v < 700, np.exp(np.minimum(v, 700)), np.inf))

    violations.sort(key=lambda viol: viol.v)
    return AdmissibilityReport(
        passed=not violations,
        n_samples=n_samples,
        v_max=v_max,
        violations=tuple(violations),
    )

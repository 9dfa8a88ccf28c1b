"""Lyapunov functionals and monotonicity monitors.

Two functionals certify global stability:

* the disease-free functional, for R0 <= 1,

      V_theta = integral of  u*v + theta/2*(u - Lambda/mu)^2 + v^2/2 + (Lambda/sigma)*v

  with the weight theta taken from the window computed in
  :mod:`sisrd.stability`;

* the endemic functional, for R0 > 1,

      V = integral of  u* L(u/u*) + v* L(v/v*)

  built from the convex function L(x) = x - 1 - ln(x), which vanishes
  only at x = 1.

Both accept either scalars (the well-mixed model, where the integral
degenerates to a point evaluation) or :class:`~sisrd.pde.Field1D`
values, integrated by the composite trapezoid rule to match the
second-order spatial discretization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .incidence import Incidence
from .model import ModelParams
from .pde import Field1D

State = Union[float, Field1D]

DEFAULT_MONOTONE_TOL = 1e-8


def volterra(x):
    """L(x) = x - 1 - ln(x) for x > 0; zero exactly at x = 1."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("volterra is defined for x > 0 only")
    result = arr - 1.0 - np.log(arr)
    return float(result) if np.isscalar(x) else result


@dataclass(frozen=True)
class RatioOrderingReport:
    passed: bool
    worst_violation: float
    worst_v: Optional[float]


def volterra_ratio_check(
    spec: Incidence,
    v_star: float,
    v_samples: Optional[np.ndarray] = None,
    n_samples: int = 1000,
    v_max: float = 100.0,
    tol: float = 1e-12,
) -> RatioOrderingReport:
    """Check L(phi(v)/phi(v*)) <= L(v/v*) on a sample grid.

    This ordering, a consequence of the sublinearity of phi, is what
    makes the endemic functional decrease along trajectories.  Default
    samples are log-spaced in (0, v_max].
    """
    if not (v_star > 0):
        raise ValueError(f"v_star must be positive, got {v_star}")
    if v_samples is None:
        v_samples = np.geomspace(v_max * 1e-10, v_max, n_samples)
    v_samples = np.asarray(v_samples, dtype=float)
    phi_star = spec.phi(v_star)
    lhs = volterra(spec.phi(v_samples) / phi_star)
    rhs = volterra(v_samples / v_star)
    gap = np.asarray(lhs - rhs)
    worst = float(np.max(gap))
    if worst > tol:
        return RatioOrderingReport(False, worst, float(v_samples[int(np.argmax(gap))]))
    return RatioOrderingReport(True, max(worst, 0.0), None)


def _as_pair(u: State, v: State):
    """Return (u_values, v_values, dx_or_None) after grid validation."""
    u_is_field = isinstance(u, Field1D)
    v_is_field = isinstance(v, Field1D)
    if u_is_field != v_is_field:
        raise ValueError("u and v must both be fields or both be scalars")
    if u_is_field:
        if not u.same_grid(v):
            raise ValueError("u and v must share a grid")
        return u.values, v.values, u.dx
    return float(u), float(v), None


def disease_free_functional(u: State, v: State, params: ModelParams, theta: float) -> float:
    """Evaluate V_theta at a state; for fields, trapezoid quadrature over (0, L)."""
    if not (theta > 0):
        raise ValueError(f"theta must be positive, got {theta}")
    uu, vv, dx = _as_pair(u, v)
    integrand = (
        uu * vv
        + 0.5 * theta * (uu - params.Lambda / params.mu) ** 2
        + 0.5 * vv**2
        + params.Lambda / params.sigma * vv
    )
    if dx is None:
        return float(integrand)
    return float(np.trapezoid(integrand, dx=dx))


def endemic_functional(u: State, v: State, equilibrium: tuple[float, float]) -> float:
    """Evaluate the endemic functional at a state.

    Raises:
        ValueError: if any point has u <= 0 or v <= 0 (the Volterra
            function is undefined there); the first offending grid
            index is named.
    """
    u_star, v_star = equilibrium
    if not (u_star > 0 and v_star > 0):
        raise ValueError("the endemic state must be positive")
    uu, vv, dx = _as_pair(u, v)
    if dx is None:
        if uu <= 0 or vv <= 0:
            raise ValueError(f"state ({uu}, {vv}) is not positive")
        return float(u_star * volterra(uu / u_star) + v_star * volterra(vv / v_star))
    bad = np.nonzero((uu <= 0) | (vv <= 0))[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"nonpositive state at grid index {i}: u={uu[i]}, v={vv[i]}")
    integrand = u_star * volterra(uu / u_star) + v_star * volterra(vv / v_star)
    return float(np.trapezoid(integrand, dx=dx))


DISEASE_FREE = "disease_free"
ENDEMIC = "endemic"


@dataclass(frozen=True)
class LyapunovSeries:
    """A Lyapunov functional sampled along a trajectory."""

    times: np.ndarray
    values: np.ndarray
    kind: str
    theta: Optional[float] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.size != values.size or times.size == 0:
            raise ValueError("times and values must be nonempty and equally long")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.kind not in (DISEASE_FREE, ENDEMIC):
            raise ValueError(f"unknown series kind {self.kind!r}")

    @property
    def max_increase(self) -> float:
        """Largest positive forward difference (0 for monotone series)."""
        if self.values.size < 2:
            return 0.0
        return max(0.0, float(np.max(np.diff(self.values))))


@dataclass(frozen=True)
class MonotonicityReport:
    passed: bool
    max_increase: float
    threshold: float


def monotonicity_check(series: LyapunovSeries, tol: float = DEFAULT_MONOTONE_TOL) -> MonotonicityReport:
    """Pass iff every forward difference stays below tol * max(1, max|V|).

    The functionals decrease exactly in the continuum; the tolerance
    absorbs rounding-scale increases of the discrete trajectory.
    """
    if tol < 0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    threshold = tol * max(1.0, float(np.max(np.abs(series.values))))
    increase = series.max_increase
    return MonotonicityReport(increase <= threshold, increase, threshold)

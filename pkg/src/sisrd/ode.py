"""Fixed-step RK4 integration of the well-mixed (diffusion-free) model.

The reaction system is

    du/dt = Lambda - mu*u - lam*u*phi(v)
    dv/dt = -sigma*v + lam*u*phi(v)

whose trajectories stay in the region {u, v >= 0, u + v <= Lambda/sigma0}
once they enter it.  A fixed step keeps Lyapunov-series differencing and
regression tests deterministic; there is no positivity clamping, so any
violation surfaces in the invariant-region monitor instead of being
silently repaired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .incidence import Incidence, phi_callable
from .model import BlowUpError, ModelParams

DEFAULT_DT = 1e-3
DEFAULT_STRIDE = 100
BLOWUP_LIMIT = 1e12


@dataclass(frozen=True)
class OdeState:
    t: float
    u: float
    v: float


@dataclass(frozen=True)
class OdeTrajectory:
    """Recorded states of one integration (arrays indexed together)."""

    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    final_rhs_norm: float

    def __len__(self) -> int:
        return self.t.size

    def states(self) -> Iterator[OdeState]:
        for i in range(self.t.size):
            yield OdeState(float(self.t[i]), float(self.u[i]), float(self.v[i]))

    @property
    def final(self) -> OdeState:
        return OdeState(float(self.t[-1]), float(self.u[-1]), float(self.v[-1]))


def rhs(params: ModelParams, spec: Incidence, u: float, v: float) -> tuple[float, float]:
    """Reaction rates (du/dt, dv/dt) at the state (u, v)."""
    pressure = params.lam * u * phi_callable(spec)(v)
    return (params.Lambda - params.mu * u - pressure, -params.sigma * v + pressure)


def integrate_ode(
    params: ModelParams,
    spec: Incidence,
    u0: float,
    v0: float,
    t_end: float,
    dt: float = DEFAULT_DT,
    stride: int = DEFAULT_STRIDE,
) -> OdeTrajectory:
    """Classical RK4 with fixed step dt, recording every ``stride``-th state.

    The final state is always recorded (with a short last step if dt
    does not divide t_end).

    Raises:
        ValueError: negative initial data or nonpositive dt/t_end/stride.
        BlowUpError: a component left [-1e12, 1e12] or went non-finite,
            which signals dt too large for the given parameters.
    """
    if u0 < 0 or v0 < 0:
        raise ValueError("initial data must be nonnegative")
    if not (dt > 0 and t_end > 0):
        raise ValueError("dt and t_end must be positive")
    if stride < 1:
        raise ValueError("stride must be at least 1")

    phi = phi_callable(spec)
    Lam, mu, lam, sig = params.Lambda, params.mu, params.lam, params.sigma

    n_full = int(math.floor(t_end / dt + 1e-9))
    remainder = t_end - n_full * dt
    if remainder < 1e-12 * max(1.0, t_end):
        remainder = 0.0

    ts = [0.0]
    us = [float(u0)]
    vs = [float(v0)]
    u, v = float(u0), float(v0)

    def step(u: float, v: float, h: float) -> tuple[float, float]:
        p = lam * u * phi(v)
        k1u = Lam - mu * u - p
        k1v = -sig * v + p
        u2, v2 = u + 0.5 * h * k1u, v + 0.5 * h * k1v
        p = lam * u2 * phi(v2)
        k2u = Lam - mu * u2 - p
        k2v = -sig * v2 + p
        u3, v3 = u + 0.5 * h * k2u, v + 0.5 * h * k2v
        p = lam * u3 * phi(v3)
        k3u = Lam - mu * u3 - p
        k3v = -sig * v3 + p
        u4, v4 = u + h * k3u, v + h * k3v
        p = lam * u4 * phi(v4)
        k4u = Lam - mu * u4 - p
        k4v = -sig * v4 + p
        return (
            u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )

    for i in range(1, n_full + 1):
        u, v = step(u, v, dt)
        if i % stride == 0:
            if not (abs(u) < BLOWUP_LIMIT and abs(v) < BLOWUP_LIMIT) or u != u or v != v:
                raise BlowUpError(f"state ({u}, {v}) at t={i * dt}; reduce dt")
            ts.append(i * dt)
            us.append(u)
            vs.append(v)
    if remainder > 0.0:
        u, v = step(u, v, remainder)
    if not (abs(u) < BLOWUP_LIMIT and abs(v) < BLOWUP_LIMIT) or u != u or v != v:
        raise BlowUpError(f"state ({u}, {v}) at t={t_end}; reduce dt")
    if ts[-1] != t_end:
        ts.append(t_end)
        us.append(u)
        vs.append(v)

    du, dv = rhs(params, spec, u, v)
    return OdeTrajectory(
        t=np.array(ts),
        u=np.array(us),
        v=np.array(vs),
        final_rhs_norm=max(abs(du), abs(dv)),
    )


@dataclass(frozen=True)
class RegionReport:
    """Invariant-region verdict: worst excess over the decay envelope
    and worst dip below zero, both clipped at 0."""

    passed: bool
    worst_excess: float
    worst_negative: float


def invariant_region_check(traj: OdeTrajectory, params: ModelParams) -> RegionReport:
    """Check the trajectory against the attracting-region envelope.

    The total population N = u + v must satisfy

        N(t) <= Lambda/sigma0 + (N(0) - Lambda/sigma0) * exp(-sigma0*t) + tol

    pointwise (so trajectories started outside the region decay into
    it), and both components must stay above -tol, with
    tol = 1e-9 * (1 + Lambda/sigma0).
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    cap = params.population_cap
    tol = 1e-9 * (1.0 + cap)
    n = traj.u + traj.v
    envelope = cap + (n[0] - cap) * np.exp(-params.sigma0 * traj.t)
    worst_excess = float(np.max(n - envelope))
    worst_negative = float(-min(np.min(traj.u), np.min(traj.v), 0.0))
    passed = worst_excess <= tol and worst_negative <= tol
    return RegionReport(passed, max(0.0, worst_excess), worst_negative)

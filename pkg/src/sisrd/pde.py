"""Method-of-lines solver for the diffusive model on a 1-D interval.

Space is discretized on a uniform grid over (0, L) with second-order
central differences; the zero-flux boundaries use ghost-point
reflection (f[-1] = f[1] and f[n] = f[n-2]), which keeps the scheme
O(dx^2) up to the walls.  Time stepping is classical fixed-step RK4
with the step chosen against the diffusive stability limit,

    dt = 0.4 * dx^2 / (2 * max(d1, d2, eps)),

capped at the reaction-scale step so that diffusion-free systems remain
integrable.  A numba kernel handles the built-in incidence families;
a numpy stepper with identical arithmetic covers custom incidence and
serves as the reference implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .incidence import (
    HalfSaturationIncidence,
    Incidence,
    LinearIncidence,
    SaturatedIncidence,
    phi_callable,
)
from .model import BlowUpError, ModelParams

CFL_SAFETY = 0.4
CFL_EPS = 1e-12
REACTION_DT_CAP = 1e-3
BLOWUP_LIMIT = 1e12

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency here
    njit = None
    HAVE_NUMBA = False


@dataclass(frozen=True)
class Field1D:
    """A sampled function on the uniform grid over (0, L), endpoints included."""

    L: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if not (self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")
        if values.ndim != 1 or values.size < 3:
            raise ValueError("a field needs at least 3 grid points")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return self.L / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n)

    @classmethod
    def constant(cls, L: float, n: int, value: float) -> "Field1D":
        return cls(L, np.full(n, float(value)))

    @classmethod
    def from_callable(cls, L: float, n: int, fn: Callable) -> "Field1D":
        x = np.linspace(0.0, L, n)
        return cls(L, np.asarray(fn(x), dtype=float) + np.zeros(n))

    def same_grid(self, other: "Field1D") -> bool:
        return self.n == other.n and self.L == other.L


def _laplacian_values(f: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(f)
    out[1:-1] = f[:-2] - 2.0 * f[1:-1] + f[2:]
    out[0] = 2.0 * (f[1] - f[0])
    out[-1] = 2.0 * (f[-2] - f[-1])
    out /= dx * dx
    return out


def apply_laplacian_neumann(field: Field1D) -> Field1D:
    """Discrete Laplacian with ghost-point reflection at both walls."""
    return Field1D(field.L, _laplacian_values(field.values, field.dx))


@dataclass(frozen=True)
class PdeSnapshot:
    t: float
    u: Field1D
    v: Field1D
    sup_u: float
    sup_v: float
    mass: float

    @classmethod
    def capture(cls, t: float, u: Field1D, v: Field1D) -> "PdeSnapshot":
        mass = float(np.trapezoid(u.values + v.values, dx=u.dx))
        return cls(
            t=t,
            u=u,
            v=v,
            sup_u=float(np.max(np.abs(u.values))),
            sup_v=float(np.max(np.abs(v.values))),
            mass=mass,
        )


def _family_code(spec: Incidence) -> Optional[tuple[int, float, float]]:
    if isinstance(spec, LinearIncidence):
        return 0, spec.alpha, 0.0
    if isinstance(spec, SaturatedIncidence):
        return 1, spec.alpha, spec.k
    if isinstance(spec, HalfSaturationIncidence):
        return 2, spec.k, spec.alpha
    return None


if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _step_chunk_numba(u, v, n_steps, dt, d1x, d2x, Lam, mu, lam, sig, fam, p1, p2):
        n = u.shape[0]
        k1u = np.empty(n)
        k1v = np.empty(n)
        k2u = np.empty(n)
        k2v = np.empty(n)
        k3u = np.empty(n)
        k3v = np.empty(n)
        k4u = np.empty(n)
        k4v = np.empty(n)
        su = np.empty(n)
        sv = np.empty(n)
        for _ in range(n_steps):
            for stage in range(4):
                if stage == 0:
                    cu, cv, ku, kv = u, v, k1u, k1v
                elif stage == 1:
                    for i in range(n):
                        su[i] = u[i] + 0.5 * dt * k1u[i]
                        sv[i] = v[i] + 0.5 * dt * k1v[i]
                    cu, cv, ku, kv = su, sv, k2u, k2v
                elif stage == 2:
                    for i in range(n):
                        su[i] = u[i] + 0.5 * dt * k2u[i]
                        sv[i] = v[i] + 0.5 * dt * k2v[i]
                    cu, cv, ku, kv = su, sv, k3u, k3v
                else:
                    for i in range(n):
                        su[i] = u[i] + dt * k3u[i]
                        sv[i] = v[i] + dt * k3v[i]
                    cu, cv, ku, kv = su, sv, k4u, k4v
                for i in range(n):
                    if i == 0:
                        lap_u = 2.0 * (cu[1] - cu[0])
                        lap_v = 2.0 * (cv[1] - cv[0])
                    elif i == n - 1:
                        lap_u = 2.0 * (cu[n - 2] - cu[n - 1])
                        lap_v = 2.0 * (cv[n - 2] - cv[n - 1])
                    else:
                        lap_u = cu[i - 1] - 2.0 * cu[i] + cu[i + 1]
                        lap_v = cv[i - 1] - 2.0 * cv[i] + cv[i + 1]
                    vv = cv[i]
                    if fam == 0:
                        ph = p1 * vv
                    elif fam == 1:
                        ph = p1 * vv / (1.0 + p2 * vv)
                    else:
                        ph = p1 * vv / (1.0 + vv / p2)
                    pressure = lam * cu[i] * ph
                    ku[i] = d1x * lap_u + Lam - mu * cu[i] - pressure
                    kv[i] = d2x * lap_v - sig * vv + pressure
            c = dt / 6.0
            for i in range(n):
                u[i] += c * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i])
                v[i] += c * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])


def _step_chunk_numpy(u, v, n_steps, dt, d1x, d2x, params: ModelParams, phi: Callable):
    Lam, mu, lam, sig = params.Lambda, params.mu, params.lam, params.sigma

    def rhs(cu, cv):
        lap_u = np.empty_like(cu)
        lap_v = np.empty_like(cv)
        lap_u[1:-1] = cu[:-2] - 2.0 * cu[1:-1] + cu[2:]
        lap_u[0] = 2.0 * (cu[1] - cu[0])
        lap_u[-1] = 2.0 * (cu[-2] - cu[-1])
        lap_v[1:-1] = cv[:-2] - 2.0 * cv[1:-1] + cv[2:]
        lap_v[0] = 2.0 * (cv[1] - cv[0])
        lap_v[-1] = 2.0 * (cv[-2] - cv[-1])
        pressure = lam * cu * phi(cv)
        du = d1x * lap_u + Lam - mu * cu - pressure
        dv = d2x * lap_v - sig * cv + pressure
        return du, dv

    for _ in range(n_steps):
        k1u, k1v = rhs(u, v)
        k2u, k2v = rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v)
        k3u, k3v = rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v)
        k4u, k4v = rhs(u + dt * k3u, v + dt * k3v)
        u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)


def stable_time_step(params: ModelParams, dx: float) -> float:
    """Diffusive CFL step with safety factor, capped at the reaction scale."""
    dt = CFL_SAFETY * dx * dx / (2.0 * max(params.d1, params.d2, CFL_EPS))
    return min(dt, REACTION_DT_CAP)


def integrate_pde(
    params: ModelParams,
    spec: Incidence,
    u0: Field1D,
    v0: Field1D,
    t_end: float,
    snapshot_every: float = 1.0,
    dt: Optional[float] = None,
    accelerate: bool = True,
) -> list[PdeSnapshot]:
    """Integrate the diffusive model, returning snapshots of the fields.

    Snapshots are recorded at (approximately) the requested cadence and
    always at t = 0 and t = t_end.  ``dt`` overrides the automatic step
    (useful for convergence studies); the default follows
    :func:`stable_time_step`.

    Raises:
        ValueError: mismatched grids, negative initial data, or bad times.
        BlowUpError: a field left [-1e12, 1e12] or went non-finite.
    """
    if not u0.same_grid(v0):
        raise ValueError("u0 and v0 must share a grid")
    if np.any(u0.values < 0) or np.any(v0.values < 0):
        raise ValueError("initial data must be nonnegative")
    if not (t_end > 0 and snapshot_every > 0):
        raise ValueError("t_end and snapshot_every must be positive")

    dx = u0.dx
    if dt is None:
        dt = stable_time_step(params, dx)
    if not (dt > 1e-12):
        raise ValueError(f"time step underflow: dt = {dt}")

    n_full = int(math.floor(t_end / dt + 1e-9))
    remainder = t_end - n_full * dt
    if remainder < 1e-12 * max(1.0, t_end):
        remainder = 0.0

    # Snapshot schedule as step indices, deduplicated and ascending.
    marks: list[int] = []
    j = 1
    while j * snapshot_every < t_end - 1e-12:
        k = int(round(j * snapshot_every / dt))
        if 0 < k <= n_full and (not marks or k > marks[-1]):
            marks.append(k)
        j += 1
    if not marks or marks[-1] != n_full:
        marks.append(n_full)

    code = _family_code(spec) if (accelerate and HAVE_NUMBA) else None
    phi = phi_callable(spec)
    d1x = params.d1 / (dx * dx)
    d2x = params.d2 / (dx * dx)

    u = u0.values.copy()
    v = v0.values.copy()
    L = u0.L
    snapshots = [PdeSnapshot.capture(0.0, Field1D(L, u.copy()), Field1D(L, v.copy()))]

    def advance(n_steps: int, step: float):
        if n_steps <= 0:
            return
        if code is not None:
            fam, p1, p2 = code
            _step_chunk_numba(
                u, v, n_steps, step, d1x, d2x,
                params.Lambda, params.mu, params.lam, params.sigma, fam, p1, p2,
            )
        else:
            _step_chunk_numpy(u, v, n_steps, step, d1x, d2x, params, phi)
        sup = max(np.max(np.abs(u)), np.max(np.abs(v)))
        if not np.isfinite(sup) or sup > BLOWUP_LIMIT:
            raise BlowUpError(
                f"field magnitude reached {sup!r}; the time step is too large "
                "or the system is inadmissible"
            )

    done = 0
    for k in marks:
        advance(k - done, dt)
        done = k
        t_k = k * dt if (k < n_full or remainder > 0.0) else t_end
        if k == n_full and remainder > 0.0:
            advance(1, remainder)
            t_k = t_end
        snapshots.append(PdeSnapshot.capture(t_k, Field1D(L, u.copy()), Field1D(L, v.copy())))
    return snapshots


@dataclass(frozen=True)
class BoundednessReport:
    """Verdicts for the a-priori bounds on a PDE run.

    ``sup_excess``: worst amount by which sup u exceeded max(Lambda/mu, sup u0).
    ``mass_excess``: worst amount by which the total mass exceeded its
    exponential envelope.  ``negative_excess``: worst pointwise dip
    below zero.  All three are clipped at 0 from below.
    """

    passed: bool
    sup_excess: float
    mass_excess: float
    negative_excess: float


def boundedness_check(
    snapshots: list[PdeSnapshot], params: ModelParams, u0: Field1D, v0: Field1D
) -> BoundednessReport:
    """Check sup-norm, integral-mass and positivity bounds on a run.

    The susceptible field can never exceed max(Lambda/mu, sup u0); the
    total mass obeys the decay envelope

        mass(t) <= L*Lambda/sigma0 + (mass(0) - L*Lambda/sigma0) * exp(-sigma0*t);

    and both fields stay nonnegative.  Tolerances are 1e-6 relative.
    """
    if not snapshots:
        raise ValueError("no snapshots to check")
    L = u0.L
    sup_bound = max(params.Lambda / params.mu, float(np.max(u0.values)))
    mass_cap = L * params.population_cap
    mass0 = snapshots[0].mass
    tol_sup = 1e-6 * max(1.0, sup_bound)
    tol_mass = 1e-6 * max(1.0, abs(mass0), mass_cap)
    tol_neg = 1e-6

    sup_excess = 0.0
    mass_excess = 0.0
    negative_excess = 0.0
    for snap in snapshots:
        sup_u = float(np.max(snap.u.values))
        sup_excess = max(sup_excess, sup_u - sup_bound)
        envelope = mass_cap + (mass0 - mass_cap) * math.exp(-params.sigma0 * snap.t)
        mass_excess = max(mass_excess, snap.mass - envelope)
        low = min(float(np.min(snap.u.values)), float(np.min(snap.v.values)))
        negative_excess = max(negative_excess, -low)
    passed = sup_excess <= tol_sup and mass_excess <= tol_mass and negative_excess <= tol_neg
    return BoundednessReport(
        passed=passed,
        sup_excess=max(0.0, sup_excess),
        mass_excess=max(0.0, mass_excess),
        negative_excess=max(0.0, negative_excess),
    )


def boundary_flux(field: Field1D) -> tuple[float, float]:
    """One-sided second-order first derivatives at the two walls."""
    f = field.values
    dx = field.dx
    left = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    right = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return float(left), float(right)


def spatial_variance(field: Field1D) -> float:
    """Trapezoid-weighted variance of the field around its mean."""
    mean = float(np.trapezoid(field.values, dx=field.dx)) / field.L
    return float(np.trapezoid((field.values - mean) ** 2, dx=field.dx)) / field.L

"""Steady states and the basic reproduction number.

The model always has the disease-free state E0 = (Lambda/mu, 0).  The
basic reproduction number, obtained as the spectral radius of the
next-generation matrix, is

    R0 = Lambda * lam * phi'(0) / (mu * sigma).

When R0 > 1 a unique endemic state (u*, v*) appears, with v* the unique
positive root of the balance function

    h(v) = (Lambda*lam/(mu*sigma)) * phi(v)/v - (lam/mu) * phi(v) - 1,

which is strictly decreasing, tends to R0 - 1 as v -> 0+, and is
negative at v = Lambda/sigma0.  The root is found by bisection (the
bracket is guaranteed by monotonicity) followed by a Newton polish; the
three built-in incidence families also admit closed forms, kept as an
independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .incidence import (
    HalfSaturationIncidence,
    Incidence,
    LinearIncidence,
    SaturatedIncidence,
    phi_callable,
)
from .model import ModelParams

RESIDUAL_TARGET = 1e-10
NEWTON_FD_STEP = 1e-7
BRACKET_EPS_START = 1e-6
BRACKET_MAX_HALVINGS = 60


class ConvergenceError(RuntimeError):
    """The endemic root search could not bracket or converge."""


@dataclass(frozen=True)
class EquilibriumReport:
    """Everything the equilibrium computation produced.

    Attributes:
        disease_free: E0 = (Lambda/mu, 0), always present.
        R0: the basic reproduction number.
        endemic: (u*, v*) when R0 > 1, else None.
        bracket: the (a, b) interval handed to the root search, or None.
        residual: |h(v*)| at the accepted root, or None.
    """

    disease_free: tuple[float, float]
    R0: float
    endemic: Optional[tuple[float, float]]
    bracket: Optional[tuple[float, float]]
    residual: Optional[float]


def basic_reproduction_number(params: ModelParams, spec: Incidence) -> float:
    """R0 = Lambda * lam * phi'(0) / (mu * sigma)."""
    return params.Lambda * params.lam * spec.slope0 / (params.mu * params.sigma)


def endemic_balance(params: ModelParams, spec: Incidence, v):
    """The balance function h whose unique positive root is v*.

    Raises:
        ValueError: if v <= 0 anywhere (h has a removable limit at 0,
            equal to R0 - 1, but is not defined there).
    """
    if np.any(np.asarray(v) <= 0):
        raise ValueError("endemic_balance is defined for v > 0 only")
    phi = spec.phi(v)
    return (
        params.Lambda * params.lam / (params.mu * params.sigma) * phi / v
        - params.lam / params.mu * phi
        - 1.0
    )


def _solve_root(params: ModelParams, spec: Incidence) -> tuple[float, tuple[float, float], float]:
    """Bisection plus Newton polish on h over (0, Lambda/sigma0]."""
    phi = phi_callable(spec)
    c1 = params.Lambda * params.lam / (params.mu * params.sigma)
    c2 = params.lam / params.mu

    def h(v: float) -> float:
        p = phi(v)
        return c1 * p / v - c2 * p - 1.0

    b = params.population_cap
    if h(b) >= 0:
        raise ConvergenceError(
            "balance function is nonnegative at the population cap; "
            "the incidence does not satisfy the admissibility conditions"
        )

    eps = BRACKET_EPS_START
    for _ in range(BRACKET_MAX_HALVINGS + 1):
        if eps < b and h(eps) > 0:
            break
        eps *= 0.5
    else:
        raise ConvergenceError(
            f"could not find h > 0 after {BRACKET_MAX_HALVINGS} halvings of the "
            "bracket start; the incidence spec looks inadmissible"
        )
    bracket = (eps, b)

    # Bisection: h is strictly decreasing, so the sign bracket is safe.
    lo, hi = eps, b
    best_v, best_r = lo, abs(h(lo))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break
        hm = h(mid)
        if abs(hm) < best_r:
            best_v, best_r = mid, abs(hm)
        if hm > 0:
            lo = mid
        elif hm < 0:
            hi = mid
        else:
            return mid, bracket, 0.0
        if hi - lo <= 1e-8 * max(1.0, hi):
            break

    # Newton polish with a central finite-difference slope; the custom
    # variant provides no second derivative, so analytic Newton is out.
    v = 0.5 * (lo + hi)
    for _ in range(60):
        hv = h(v)
        if abs(hv) < best_r:
            best_v, best_r = v, abs(hv)
        if abs(hv) <= RESIDUAL_TARGET:
            break
        step = NEWTON_FD_STEP * max(1.0, v)
        slope = (h(v + step) - h(v - step)) / (2.0 * step)
        if not np.isfinite(slope) or slope == 0.0:
            break
        v_next = v - hv / slope
        if not (lo < v_next < hi):
            v_next = 0.5 * (lo + hi)
        if hv > 0:
            lo = max(lo, v)
        else:
            hi = min(hi, v)
        if v_next == v:
            break
        v = v_next

    if best_r > RESIDUAL_TARGET:
        # Drive the bracket to machine resolution and keep the best point.
        while True:
            mid = 0.5 * (lo + hi)
            if not (lo < mid < hi):
                break
            hm = h(mid)
            if abs(hm) < best_r:
                best_v, best_r = mid, abs(hm)
            if hm > 0:
                lo = mid
            elif hm < 0:
                hi = mid
            else:
                best_v, best_r = mid, 0.0
                break

    return best_v, bracket, best_r


def solve_equilibria(params: ModelParams, spec: Incidence) -> EquilibriumReport:
    """Compute E0, R0 and, when R0 > 1, the endemic state.

    R0 = 1 exactly yields no endemic state: the two equilibria are
    distinct only above threshold.
    """
    r0 = basic_reproduction_number(params, spec)
    if r0 <= 1.0:
        return EquilibriumReport(params.disease_free(), r0, None, None, None)
    v_star, bracket, residual = _solve_root(params, spec)
    u_star = params.sigma * v_star / (params.lam * phi_callable(spec)(v_star))
    return EquilibriumReport(params.disease_free(), r0, (u_star, v_star), bracket, residual)


def find_endemic(params: ModelParams, spec: Incidence) -> Optional[tuple[float, float]]:
    """(u*, v*) from the root search, or None when R0 <= 1."""
    return solve_equilibria(params, spec).endemic


def closed_form_endemic(params: ModelParams, spec: Incidence) -> Optional[tuple[float, float]]:
    """Analytic endemic state for the built-in incidence families.

    Returns None when R0 <= 1.  Solving the steady-state balance for
    each family gives

    * linear:          u* = sigma/(lam*alpha),        v* = mu*(R0-1)/(lam*alpha)
    * saturated:       v* = mu*(R0-1)/(lam*alpha + k*mu),
                       u* = sigma*(1 + k*v*)/(lam*alpha)
    * half-saturation: v* = mu*alpha*(R0-1)/(lam*alpha*k + mu),
                       u* = sigma*(alpha + v*)/(lam*alpha*k)

    Raises:
        TypeError: for ``CustomIncidence``, which has no closed form.
    """
    r0 = basic_reproduction_number(params, spec)
    if isinstance(spec, LinearIncidence):
        if r0 <= 1.0:
            return None
        u = params.sigma / (params.lam * spec.alpha)
        v = params.mu * (r0 - 1.0) / (params.lam * spec.alpha)
        return (u, v)
    if isinstance(spec, SaturatedIncidence):
        if r0 <= 1.0:
            return None
        v = params.mu * (r0 - 1.0) / (params.lam * spec.alpha + spec.k * params.mu)
        u = params.sigma * (1.0 + spec.k * v) / (params.lam * spec.alpha)
        return (u, v)
    if isinstance(spec, HalfSaturationIncidence):
        if r0 <= 1.0:
            return None
        v = params.mu * spec.alpha * (r0 - 1.0) / (params.lam * spec.alpha * spec.k + params.mu)
        u = params.sigma * (spec.alpha + v) / (params.lam * spec.alpha * spec.k)
        return (u, v)
    raise TypeError(f"no closed-form endemic state for {type(spec).__name__}")

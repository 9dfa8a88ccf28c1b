"""Local stability classification and the Lyapunov weight window.

For the well-mixed (ODE) model, stability of a steady state is read off
the 2x2 Jacobian

    J(u, v) = [[-lam*phi(v) - mu,   -lam*u*phi'(v)],
               [ lam*phi(v),         lam*u*phi'(v) - sigma]].

With diffusion, linearizing around a constant steady state and expanding
in the Neumann eigenbasis of the Laplacian reduces the problem to the
family of matrices J_i = J - diag(d1*eig_i, d2*eig_i), one per
eigenvalue 0 = eig_0 < eig_1 <= eig_2 <= ...  On a 1-D interval of
length L the spectrum is analytic: eig_i = (i*pi/L)**2.

The module also computes the admissible window for the weight theta
used by the disease-free Lyapunov functional: theta must dominate
(d1+d2)^2/(4*d1*d2) to keep the gradient quadratic form positive, and
must stay below the value at which

    phi'(0) <= (mu + sigma) / (lam * (theta*Lambda/mu + Lambda/sigma))

fails, i.e. theta_hi = (mu/Lambda) * ((mu+sigma)/(lam*phi'(0)) - Lambda/sigma).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equilibria import basic_reproduction_number, find_endemic
from .incidence import Incidence
from .model import ModelParams

STABLE = "stable"
UNSTABLE = "unstable"
# Threshold case R0 = 1: one Jacobian eigenvalue is exactly zero, so the
# linearization is inconclusive; the global analysis still gives stability.
NON_HYPERBOLIC_STABLE = "non_hyperbolic_stable"

DEFAULT_MODES = 50


@dataclass(frozen=True)
class NeumannSpectrum:
    """Leading Laplacian eigenvalues for zero-flux boundaries on (0, L)."""

    L: float
    eigenvalues: np.ndarray

    def __post_init__(self):
        eig = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", eig)
        if not (self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")
        if eig.size == 0 or eig[0] != 0.0 or np.any(np.diff(eig) <= 0):
            raise ValueError("eigenvalues must start at 0 and increase strictly")

    @classmethod
    def interval(cls, L: float, n_modes: int = DEFAULT_MODES) -> "NeumannSpectrum":
        """eig_i = (i*pi/L)^2 for i = 0..n_modes."""
        i = np.arange(n_modes + 1, dtype=float)
        return cls(L=L, eigenvalues=(i * np.pi / L) ** 2)


@dataclass(frozen=True)
class SpectralDetail:
    """Per-eigenvalue stability data for both steady states.

    ``dfe_rates`` holds the two eigenvalues (r_i1, r_i2) of each J_i at
    the disease-free state (the matrices are triangular there);
    ``endemic_traces``/``endemic_dets`` hold trace and determinant of
    J_i at the endemic state, or None when it does not exist.
    """

    eigenvalues: np.ndarray
    dfe_rates: np.ndarray
    endemic_traces: Optional[np.ndarray]
    endemic_dets: Optional[np.ndarray]


@dataclass(frozen=True)
class StabilityReport:
    ode_disease_free: str
    ode_endemic: Optional[str]
    pde_disease_free: str
    pde_endemic: Optional[str]
    theta_window: Optional[tuple[float, float]]
    jacobian_disease_free: np.ndarray
    jacobian_endemic: Optional[np.ndarray]
    spectral: SpectralDetail


def jacobian(params: ModelParams, spec: Incidence, u: float, v: float) -> np.ndarray:
    """Jacobian of the reaction terms at the state (u, v)."""
    phi = spec.phi(v)
    dphi = spec.dphi(v)
    return np.array(
        [
            [-params.lam * phi - params.mu, -params.lam * u * dphi],
            [params.lam * phi, params.lam * u * dphi - params.sigma],
        ]
    )


def _classify_threshold(r0: float) -> str:
    if r0 < 1.0:
        return STABLE
    if r0 == 1.0:
        return NON_HYPERBOLIC_STABLE
    return UNSTABLE


def ode_local_stability(params: ModelParams, spec: Incidence) -> tuple[str, Optional[str]]:
    """Classify E0 and, when present, the endemic state for the ODE model.

    E0 has eigenvalues -mu and sigma*(R0 - 1), so its class follows the
    sign of R0 - 1 (with the non-hyperbolic threshold case at equality).
    The endemic state is classified by trace < 0 and det > 0.
    """
    r0 = basic_reproduction_number(params, spec)
    dfe_class = _classify_threshold(r0)
    endemic = find_endemic(params, spec)
    if endemic is None:
        return dfe_class, None
    jac = jacobian(params, spec, *endemic)
    trace = jac[0, 0] + jac[1, 1]
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    endemic_class = STABLE if (trace < 0 and det > 0) else UNSTABLE
    return dfe_class, endemic_class


def endemic_spectral_coefficients(
    params: ModelParams, spec: Incidence, u_star: float, v_star: float
) -> tuple[float, float, float]:
    """Coefficients (a, b, c) of det J_i = a*eig^2 + b*eig + c at the endemic state.

    a = d1*d2, c = det J, and the linear coefficient is

        b = -d1*lam*u*phi'(v*) + d1*sigma + d2*lam*phi(v*) + d2*mu,

    which the sublinearity of phi bounds below by d2*Lambda/u* > 0, so
    every det J_i is positive once c > 0.
    """
    phi = spec.phi(v_star)
    dphi = spec.dphi(v_star)
    jac = jacobian(params, spec, u_star, v_star)
    det0 = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    linear = (
        -params.d1 * params.lam * u_star * dphi
        + params.d1 * params.sigma
        + params.d2 * params.lam * phi
        + params.d2 * params.mu
    )
    return params.d1 * params.d2, float(linear), float(det0)


def pde_spectral_check(
    params: ModelParams, spec: Incidence, spectrum: NeumannSpectrum
) -> tuple[str, Optional[str], SpectralDetail]:
    """Classify both steady states of the diffusive model.

    At E0 every J_i is triangular with eigenvalues r_i1 = -d1*eig_i - mu
    and r_i2 = -d2*eig_i + sigma*(R0 - 1); the largest is r_02, so the
    verdict again follows the sign of R0 - 1.  At the endemic state
    trace J_i = trace J - eig_i*(d1 + d2) and det J_i is the quadratic
    from :func:`endemic_spectral_coefficients`; both stay on the stable
    side for every mode whenever they do for i = 0.
    """
    eig = spectrum.eigenvalues
    r0 = basic_reproduction_number(params, spec)
    growth = params.sigma * (r0 - 1.0)
    rates = np.column_stack((-params.d1 * eig - params.mu, -params.d2 * eig + growth))
    dfe_class = _classify_threshold(r0)

    endemic = find_endemic(params, spec)
    if endemic is None:
        return dfe_class, None, SpectralDetail(eig, rates, None, None)

    jac = jacobian(params, spec, *endemic)
    trace0 = jac[0, 0] + jac[1, 1]
    quad, lin, det0 = endemic_spectral_coefficients(params, spec, *endemic)
    traces = trace0 - eig * (params.d1 + params.d2)
    dets = quad * eig**2 + lin * eig + det0
    endemic_class = STABLE if (trace0 < 0 and np.all(dets > 0)) else UNSTABLE
    return dfe_class, endemic_class, SpectralDetail(eig, rates, traces, dets)


def theta_window(params: ModelParams, spec: Incidence) -> Optional[tuple[float, float]]:
    """Admissible interval for the disease-free Lyapunov weight theta.

    The lower end is (d1+d2)^2/(4*d1*d2) for positive diffusivities (1
    when d1 = d2 and in the diffusion-free model, where theta = 1 always
    works).  The upper end rearranges the slope condition on phi'(0).
    Returns None when the interval is empty, i.e. the certificate does
    not apply at these parameters.

    Raises:
        ValueError: if exactly one diffusivity is zero; the gradient
            quadratic-form argument needs both positive.
    """
    if params.d1 == 0.0 and params.d2 == 0.0:
        lo = 1.0
    elif params.d1 > 0.0 and params.d2 > 0.0:
        lo = (params.d1 + params.d2) ** 2 / (4.0 * params.d1 * params.d2)
    else:
        raise ValueError("theta window needs both diffusivities positive or both zero")
    hi = (params.mu / params.Lambda) * (
        (params.mu + params.sigma) / (params.lam * spec.slope0) - params.Lambda / params.sigma
    )
    if lo <= hi:
        return (lo, hi)
    return None


def stability_report(
    params: ModelParams,
    spec: Incidence,
    spectrum: Optional[NeumannSpectrum] = None,
    L: float = 10.0,
    n_modes: int = DEFAULT_MODES,
) -> StabilityReport:
    """Assemble the full local-stability picture at the given parameters."""
    if spectrum is None:
        spectrum = NeumannSpectrum.interval(L, n_modes)
    ode_dfe, ode_endemic = ode_local_stability(params, spec)
    pde_dfe, pde_endemic, detail = pde_spectral_check(params, spec, spectrum)
    endemic = find_endemic(params, spec)
    jac_endemic = jacobian(params, spec, *endemic) if endemic is not None else None
    try:
        window = theta_window(params, spec)
    except ValueError:
        window = None
    return StabilityReport(
        ode_disease_free=ode_dfe,
        ode_endemic=ode_endemic,
        pde_disease_free=pde_dfe,
        pde_endemic=pde_endemic,
        theta_window=window,
        jacobian_disease_free=jacobian(params, spec, *params.disease_free()),
        jacobian_endemic=jac_endemic,
        spectral=detail,
    )

"""Analysis and simulation of a diffusive SIS model with nonlinear incidence.

The package computes equilibria and the basic reproduction number,
classifies local stability for the well-mixed and diffusive models,
evaluates the Lyapunov functionals that certify global stability, and
integrates both models with fixed-step RK4 (method of lines in space
for the diffusive case).  A CLI (``sisrd``) exposes analysis, simulation,
reproduction of the built-in reference experiments, and parameter sweeps.
"""

from .config import ConfigError, ExperimentConfig, load_config, parse_profile
from .equilibria import (
    ConvergenceError,
    EquilibriumReport,
    basic_reproduction_number,
    closed_form_endemic,
    endemic_balance,
    find_endemic,
    solve_equilibria,
)
from .incidence import (
    AdmissibilityReport,
    CustomIncidence,
    HalfSaturationIncidence,
    Incidence,
    LinearIncidence,
    SaturatedIncidence,
    check_admissible,
)
from .lyapunov import (
    LyapunovSeries,
    disease_free_functional,
    endemic_functional,
    monotonicity_check,
    volterra,
    volterra_ratio_check,
)
from .model import BlowUpError, ModelParams
from .ode import OdeState, OdeTrajectory, integrate_ode, invariant_region_check, rhs
from .pde import (
    Field1D,
    PdeSnapshot,
    apply_laplacian_neumann,
    boundedness_check,
    integrate_pde,
)
from .stability import (
    NeumannSpectrum,
    StabilityReport,
    jacobian,
    ode_local_stability,
    pde_spectral_check,
    stability_report,
    theta_window,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "BlowUpError",
    "ConfigError",
    "ConvergenceError",
    "CustomIncidence",
    "EquilibriumReport",
    "ExperimentConfig",
    "Field1D",
    "HalfSaturationIncidence",
    "Incidence",
    "LinearIncidence",
    "LyapunovSeries",
    "ModelParams",
    "NeumannSpectrum",
    "OdeState",
    "OdeTrajectory",
    "PdeSnapshot",
    "SaturatedIncidence",
    "StabilityReport",
    "apply_laplacian_neumann",
    "basic_reproduction_number",
    "boundedness_check",
    "check_admissible",
    "closed_form_endemic",
    "disease_free_functional",
    "endemic_balance",
    "endemic_functional",
    "find_endemic",
    "integrate_ode",
    "integrate_pde",
    "invariant_region_check",
    "jacobian",
    "load_config",
    "monotonicity_check",
    "ode_local_stability",
    "parse_profile",
    "pde_spectral_check",
    "rhs",
    "solve_equilibria",
    "stability_report",
    "theta_window",
    "volterra",
    "volterra_ratio_check",
]

"""Quantum particle dragged by a suddenly moving delta-well trap.

Units follow the convention hbar = 2m = 1, so the Schroedinger equation
reads i dpsi/dt = -psi_xx + V psi and a well of strength gamma binds one
state psi(x) = sqrt(gamma/2) exp(-gamma|x|/2) with energy -gamma^2/4.
"""

from .specfun import faddeyeva, moshinsky
from .analytic import (
    WellParams,
    IdentityCase,
    initial_bound_state,
    free_propagator,
    free_evolution,
    moving_delta_propagator,
    exact_wavefunction_closed,
    exact_wavefunction_quadrature,
    moving_bound_eigenstate,
    survival_probability,
    survival_overlap_quadrature,
    asymptotic_terms,
    characteristic_frequencies,
    massey_parameter,
    integral_identity_residual,
)
from .oracle import (
    GridSpec,
    DeltaModel,
    WavefunctionField,
    ground_state_on_grid,
    step_crank_nicolson,
    evolve,
    overlap,
    norm,
)
from .analysis import (
    PeakTrace,
    SpectrumResult,
    track_peaks,
    fit_power_law,
    spectrum,
    identify_spectral_peaks,
)
from .errors import NonConvergenceError

__version__ = "0.1.0"

__all__ = [
    "faddeyeva",
    "moshinsky",
    "WellParams",
    "IdentityCase",
    "initial_bound_state",
    "free_propagator",
    "free_evolution",
    "moving_delta_propagator",
    "exact_wavefunction_closed",
    "exact_wavefunction_quadrature",
    "moving_bound_eigenstate",
    "survival_probability",
    "survival_overlap_quadrature",
    "asymptotic_terms",
    "characteristic_frequencies",
    "massey_parameter",
    "integral_identity_residual",
    "GridSpec",
    "DeltaModel",
    "WavefunctionField",
    "ground_state_on_grid",
    "step_crank_nicolson",
    "evolve",
    "overlap",
    "norm",
    "PeakTrace",
    "SpectrumResult",
    "track_peaks",
    "fit_power_law",
    "spectrum",
    "identify_spectral_peaks",
    "NonConvergenceError",
    "__version__",
]

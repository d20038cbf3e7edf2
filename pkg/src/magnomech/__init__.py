"""Steady-state entanglement in a cavity magnomechanical system with an intracavity parametric amplifier."""

from .dynamics import diffusion_matrix, drift_matrix, max_stable_gain, stability
from .gaussian import log_negativity, residual_contangle_min, symplectic_eigenvalues
from .lyapunov import solve_lyapunov
from .model import SystemParams, baseline_params, from_config, thermal_occupation, validate
from .sweep import Axis, SweepSpec, evaluate_point, grid_sweep, temperature_scan

__all__ = [
    "Axis",
    "SweepSpec",
    "SystemParams",
    "baseline_params",
    "diffusion_matrix",
    "drift_matrix",
    "evaluate_point",
    "from_config",
    "grid_sweep",
    "log_negativity",
    "max_stable_gain",
    "residual_contangle_min",
    "solve_lyapunov",
    "stability",
    "symplectic_eigenvalues",
    "temperature_scan",
    "thermal_occupation",
    "validate",
]

__version__ = "0.1.0"

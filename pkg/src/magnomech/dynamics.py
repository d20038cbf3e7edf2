"""Linearized quadrature dynamics: drift and diffusion matrices, stability.

Quadrature ordering throughout is ``(x1, y1, x2, y2, q, p)``: cavity,
magnon, then mechanics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, PreconditionError
from .model import SystemParams, ThermalOccupations, occupations

MARGINAL_FRACTION = 1e-6


def drift_matrix(params: SystemParams) -> np.ndarray:
    """6x6 drift matrix of the quadrature fluctuations.

    The parametric amplifier enters only the cavity block, as
    ``+-2G cos(theta)`` on the diagonal and ``2G sin(theta)`` off it.
    """
    p = params
    two_g = 2.0 * p.gain_G
    c, s = math.cos(p.theta), math.sin(p.theta)
    A = np.zeros((6, 6))
    A[0, 0] = -p.kappa_c + two_g * c
    A[0, 1] = p.delta_c + two_g * s
    A[0, 3] = p.g_mc
    A[1, 0] = -p.delta_c + two_g * s
    A[1, 1] = -p.kappa_c - two_g * c
    A[1, 2] = -p.g_mc
    A[2, 1] = p.g_mc
    A[2, 2] = -p.kappa_m
    A[2, 3] = p.delta_m_eff
    A[2, 4] = -p.G_mb
    A[3, 0] = -p.g_mc
    A[3, 2] = -p.delta_m_eff
    A[3, 3] = -p.kappa_m
    A[4, 5] = p.omega_b
    A[5, 3] = p.G_mb
    A[5, 4] = -p.omega_b
    A[5, 5] = -p.gamma_b
    return A


def diffusion_matrix(params: SystemParams, occ: ThermalOccupations | None = None) -> np.ndarray:
    """Diagonal noise matrix; the position quadrature of the mechanics is noiseless."""
    if occ is None:
        occ = occupations(params)
    nc = params.kappa_c * (2.0 * occ.N_c + 1.0)
    nm = params.kappa_m * (2.0 * occ.N_m + 1.0)
    nb = params.gamma_b * (2.0 * occ.N_b + 1.0)
    return np.diag([nc, nc, nm, nm, 0.0, nb])


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    margin: float
    eigenvalues: np.ndarray
    marginal: bool = False


def stability(A: np.ndarray, omega_b: float | None = None) -> StabilityReport:
    """Decide stability from the real parts of the drift-matrix spectrum.

    Stable means every eigenvalue has a strictly negative real part.  If
    ``omega_b`` is given, points with ``|margin| < 1e-6 omega_b`` are flagged
    marginal.
    """
    try:
        eig = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue solver failed: {exc}") from exc
    margin = float(np.max(eig.real))
    marginal = omega_b is not None and abs(margin) < MARGINAL_FRACTION * omega_b
    return StabilityReport(stable=margin < 0, margin=margin, eigenvalues=eig, marginal=marginal)


def is_stable(params: SystemParams) -> bool:
    return stability(drift_matrix(params)).stable


def _boundary_for_theta(params, theta, tol, g_max):
    def ok(g):
        return is_stable(params.with_(gain_G=g, theta=theta))

    lo, hi = 0.0, max(tol, 1e3)
    while ok(hi):
        lo, hi = hi, 2.0 * hi
        if hi > g_max:
            raise NumericError(f"no stability boundary found below G = {g_max:g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def max_stable_gain(params: SystemParams, theta: float | None = None, *,
                    tol: float = 1e3, n_theta: int = 64, g_max: float = 1e15) -> float:
    """Largest parametric gain (s^-1) keeping the drift matrix stable.

    Bisection on ``G`` after bracketing by doubling, to absolute tolerance
    ``tol``.  With ``theta=None`` the result is the worst case (minimum) over
    ``n_theta`` equally spaced phases in ``[0, 2pi)``.
    """
    base = params.with_(gain_G=0.0)
    if not is_stable(base):
        raise PreconditionError("system is unstable at G = 0")
    if theta is not None:
        return _boundary_for_theta(base, theta, tol, g_max)
    thetas = 2.0 * math.pi * np.arange(n_theta) / n_theta
    return min(_boundary_for_theta(base, float(t), tol, g_max) for t in thetas)

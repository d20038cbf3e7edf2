"""Drive-side quantities: Rabi frequency, mean magnon amplitude, effective coupling.

The sweep pipeline takes the effective detuning and the effective
magnomechanical coupling as direct inputs; the functions here bridge a
physical drive (field amplitude on a given sphere) to those quantities.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, SingularityError
from .model import PhysicalConstants, SphereSpec

_RABI_PREFACTOR = math.sqrt(5.0) / 4.0


@dataclass(frozen=True)
class DriveSpec:
    B0: float  # T
    Omega: float  # rad/s
    omega_0: float = 0.0  # rad/s, bookkeeping only

    def __post_init__(self):
        if self.B0 < 0 or self.Omega < 0:
            raise ValueError("B0 and Omega must be >= 0")


@dataclass(frozen=True)
class SteadyState:
    """Self-consistent mean fields of the driven magnon and phonon.

    ``other_roots`` lists additional positive solutions for ``|<m>|^2`` when
    the drive sits in a multistable region; the returned branch is the one
    reached by continuation from zero amplitude.
    """

    m_avg: complex
    q_avg: float
    delta_m_eff: float
    iterations: int
    converged: bool
    residual: float
    other_roots: tuple = ()
    excitation_warning: bool = False


def rabi_frequency(B0: float, sphere: SphereSpec = SphereSpec(),
                   constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Rabi frequency (rad/s) of a field of amplitude ``B0`` (T) driving the Kittel mode."""
    if B0 < 0:
        raise ValueError("B0 must be >= 0")
    return _RABI_PREFACTOR * constants.gamma_gyro * math.sqrt(sphere.n_spins) * B0


def field_for_rabi(Omega: float, sphere: SphereSpec = SphereSpec(),
                   constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Inverse of :func:`rabi_frequency`."""
    if Omega < 0:
        raise ValueError("Omega must be >= 0")
    return Omega / (_RABI_PREFACTOR * constants.gamma_gyro * math.sqrt(sphere.n_spins))


def effective_coupling(g_mb: float, Omega: float, omega_b: float) -> float:
    """Effective magnomechanical coupling ``sqrt(2) g_mb Omega / omega_b``.

    Only valid when both detunings sit near ``omega_b`` and
    ``g_mc**2 << omega_b**2``; the caller is responsible for that.
    """
    if omega_b == 0:
        raise ValueError("omega_b must be nonzero")
    return math.sqrt(2.0) * g_mb * Omega / omega_b


def drive_for_coupling(G_mb: float, g_mb: float, omega_b: float) -> float:
    """Rabi frequency needed to reach effective coupling ``G_mb``."""
    if g_mb == 0:
        raise ValueError("g_mb must be nonzero")
    return G_mb * omega_b / (math.sqrt(2.0) * g_mb)


def coupling_from_amplitude(g_mb: float, m_avg: complex) -> float:
    """Magnitude of the enhanced coupling ``sqrt(2) g_mb |<m>|``."""
    return math.sqrt(2.0) * g_mb * abs(m_avg)


def _cavity_factor(delta_c, kappa_c, gain_G, theta):
    return complex(kappa_c, delta_c) - 2.0 * gain_G * cmath.exp(1j * theta)


def amplitude_map(m, delta_c, delta_m_bare, kappa_c, kappa_m, g_mc, g_mb, omega_b,
                  gain_G, theta, Omega):
    """Right-hand side of the steady-state equation for ``<m>``.

    Returns ``(new_m, delta_m_eff)`` where ``delta_m_eff`` is evaluated at the input ``m``.
    """
    delta_eff = delta_m_bare - g_mb**2 / omega_b * abs(m) ** 2
    x = _cavity_factor(delta_c, kappa_c, gain_G, theta)
    den = g_mc**2 + complex(kappa_m, delta_eff) * x
    scale = g_mc**2 + abs(complex(kappa_m, delta_eff)) * abs(x)
    if scale == 0 or abs(den) <= 1e-14 * scale:
        raise SingularityError(f"vanishing denominator at |m|={abs(m):.6g}")
    return Omega * x / den, delta_eff


def intensity_roots(delta_c, delta_m_bare, kappa_c, kappa_m, g_mc, g_mb, omega_b,
                    gain_G, theta, Omega) -> list[float]:
    """All positive real solutions ``u = |<m>|^2`` of the steady-state equation.

    Clearing denominators turns the equation into a cubic in ``u``; it is
    solved in units where rates are scaled by ``omega_b`` and ``u`` by
    ``(Omega/omega_b)**2`` to keep the coefficients well conditioned.
    """
    if Omega == 0:
        return [0.0]
    s = omega_b
    x = _cavity_factor(delta_c, kappa_c, gain_G, theta) / s
    a, b = x.real, x.imag
    km = kappa_m / s
    p = (g_mc / s) ** 2 + km * a
    u_unit = (Omega / s) ** 2
    k = g_mb**2 / omega_b * u_unit / s
    # delta_eff(u) = dm - k u, in scaled units
    dm = np.polynomial.Polynomial([delta_m_bare / s, -k])
    den2 = (a * a + b * b) * dm**2 + 2.0 * b * (a * km - p) * dm + (p * p + km * km * b * b)
    poly = np.polynomial.Polynomial([0.0, 1.0]) * den2 - (a * a + b * b)
    roots = poly.roots()
    out = sorted(r.real * u_unit for r in roots
                 if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0)
    return out


def magnon_amplitude(delta_c, delta_m_bare, kappa_c, kappa_m, g_mc, g_mb, omega_b,
                     gain_G, theta, Omega, *, relaxation=0.5, tol=1e-10,
                     max_iter=10_000, n_spins=None) -> SteadyState:
    """Solve for the self-consistent mean magnon amplitude.

    Damped fixed-point iteration ``m <- (1 - r) m + r F(m)`` started from
    ``m = 0``, which follows the branch reached by ramping the drive up from
    zero.  With ``g_mb == 0`` the equation is linear and one evaluation of
    the map is returned.

    Parameters
    ----------
    delta_c, delta_m_bare : float
        Cavity and bare magnon detunings (rad/s).
    kappa_c, kappa_m, g_mc, g_mb, omega_b : float
        Rates in rad/s; ``g_mb`` is the single-magnon magnomechanical coupling.
    gain_G, theta : float
        Parametric gain (s^-1) and pump phase (rad).
    Omega : float
        Rabi frequency of the magnon drive (rad/s).
    relaxation, tol, max_iter
        Iteration controls; ``tol`` bounds ``|F(m) - m| / |m|``.
    n_spins : float, optional
        Number of spins; enables the low-excitation diagnostic
        ``|<m>|^2 > 5 N / 10``.

    Raises
    ------
    ConvergenceError
        Carries the last iterate and its residual.
    SingularityError
        If the denominator vanishes on the iteration path.
    """
    args = (delta_c, delta_m_bare, kappa_c, kappa_m, g_mc, g_mb, omega_b, gain_G, theta, Omega)

    def finish(m, iterations, residual):
        delta_eff = delta_m_bare - g_mb**2 / omega_b * abs(m) ** 2
        q = -(g_mb / omega_b) * abs(m) ** 2
        others = ()
        if g_mb != 0:
            u = abs(m) ** 2
            others = tuple(r for r in intensity_roots(*args)
                           if abs(r - u) > 1e-6 * max(u, 1e-300))
        warn = n_spins is not None and abs(m) ** 2 > 0.5 * n_spins
        return SteadyState(m_avg=m, q_avg=q, delta_m_eff=delta_eff, iterations=iterations,
                           converged=True, residual=residual, other_roots=others,
                           excitation_warning=warn)

    if g_mb == 0:
        m, _ = amplitude_map(0j, *args)
        return finish(m, 1, 0.0)

    m = 0j
    residual = math.inf
    for it in range(1, max_iter + 1):
        fm, _ = amplitude_map(m, *args)
        diff = abs(fm - m)
        norm = max(abs(fm), abs(m))
        residual = diff / norm if norm > 0 else 0.0
        if residual <= tol:
            return finish(m, it, residual)
        m = (1.0 - relaxation) * m + relaxation * fm
    raise ConvergenceError(
        f"magnon amplitude did not converge in {max_iter} iterations (residual {residual:.3g})",
        last_iterate=m, residual=residual,
    )

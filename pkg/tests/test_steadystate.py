import cmath
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from magnomech.errors import ConvergenceError, SingularityError
from magnomech.model import TWO_PI, PhysicalConstants, SphereSpec
from magnomech.steadystate import (
    DriveSpec,
    amplitude_map,
    coupling_from_amplitude,
    drive_for_coupling,
    effective_coupling,
    field_for_rabi,
    intensity_roots,
    magnon_amplitude,
    rabi_frequency,
)

WB = TWO_PI * 10e6
G_MB_SINGLE = TWO_PI * 0.2
BASE = dict(
    delta_c=-0.9 * WB, delta_m_bare=0.9 * WB, kappa_c=TWO_PI * 1e6, kappa_m=TWO_PI * 1e6,
    g_mc=TWO_PI * 3.2e6, g_mb=G_MB_SINGLE, omega_b=WB, gain_G=0.0, theta=0.0, Omega=7.1e14,
)


def test_rabi_frequency_reference_values():
    sphere = SphereSpec(250e-6, 4.22e27)
    assert sphere.n_spins == pytest.approx(3.5e16, rel=0.02)
    assert rabi_frequency(3.9e-5, sphere) == pytest.approx(7.1e14, rel=0.01)


def test_rabi_frequency_trivial():
    assert rabi_frequency(0.0) == 0.0
    assert rabi_frequency(2e-5) == pytest.approx(2 * rabi_frequency(1e-5), rel=1e-15)
    assert field_for_rabi(rabi_frequency(3.9e-5)) == pytest.approx(3.9e-5, rel=1e-14)
    with pytest.raises(ValueError):
        rabi_frequency(-1.0)


def test_gyromagnetic_override():
    c = PhysicalConstants(gamma_gyro=TWO_PI * 14e9)
    assert rabi_frequency(1e-5, constants=c) == pytest.approx(0.5 * rabi_frequency(1e-5))


def test_effective_coupling_reference_value():
    G = effective_coupling(G_MB_SINGLE, 7.1e14, WB)
    assert G / TWO_PI == pytest.approx(3.2e6, rel=0.01)
    assert effective_coupling(G_MB_SINGLE, 0.0, WB) == 0.0
    with pytest.raises(ValueError):
        effective_coupling(G_MB_SINGLE, 1.0, 0.0)


def test_drive_for_coupling():
    assert drive_for_coupling(TWO_PI * 3.2e6, G_MB_SINGLE, WB) == pytest.approx(7.1e14, rel=0.01)
    assert drive_for_coupling(TWO_PI * 4.8e6, G_MB_SINGLE, WB) == pytest.approx(1.07e15, rel=0.01)
    assert drive_for_coupling(0.0, G_MB_SINGLE, WB) == 0.0
    with pytest.raises(ValueError):
        drive_for_coupling(1.0, 0.0, WB)


@pytest.mark.parametrize("G", [0.0, TWO_PI * 1e6, TWO_PI * 4.8e6])
def test_coupling_roundtrip(G):
    back = effective_coupling(G_MB_SINGLE, drive_for_coupling(G, G_MB_SINGLE, WB), WB)
    assert back == pytest.approx(G, rel=1e-12, abs=0)


def test_drive_spec_invariants():
    DriveSpec(B0=3.9e-5, Omega=7.1e14)
    with pytest.raises(ValueError):
        DriveSpec(B0=-1.0, Omega=0.0)


def _closed_form(delta_c, delta_m, kappa_c, kappa_m, g_mc, gain_G, theta, Omega):
    x = (1j * delta_c + kappa_c) - 2 * gain_G * cmath.exp(1j * theta)
    return Omega * x / (g_mc**2 + (1j * delta_m + kappa_m) * x)


def test_linear_case_single_evaluation():
    args = dict(BASE, g_mb=0.0, gain_G=2e6, theta=1.0)
    ss = magnon_amplitude(**args)
    expected = _closed_form(args["delta_c"], args["delta_m_bare"], args["kappa_c"],
                            args["kappa_m"], args["g_mc"], 2e6, 1.0, args["Omega"])
    assert ss.iterations == 1
    assert ss.delta_m_eff == args["delta_m_bare"]
    assert ss.m_avg == pytest.approx(expected, rel=1e-14)
    assert ss.q_avg == 0.0


def test_linear_in_drive_without_nonlinearity():
    a = magnon_amplitude(**dict(BASE, g_mb=0.0, Omega=1e14)).m_avg
    b = magnon_amplitude(**dict(BASE, g_mb=0.0, Omega=3e14)).m_avg
    assert b == pytest.approx(3 * a, rel=1e-14)


def test_opa_off_matches_plain_formula():
    ss = magnon_amplitude(**dict(BASE, g_mb=0.0, gain_G=0.0, theta=2.0))
    x = 1j * BASE["delta_c"] + BASE["kappa_c"]
    expected = BASE["Omega"] * x / (BASE["g_mc"] ** 2 + (1j * BASE["delta_m_bare"] + BASE["kappa_m"]) * x)
    assert ss.m_avg == pytest.approx(expected, rel=1e-14)


def _oracle_intensities(p):
    """Positive roots of u |den(u)|^2 - Omega^2 |X|^2, bracketed on a log grid."""
    x = (1j * p["delta_c"] + p["kappa_c"]) - 2 * p["gain_G"] * cmath.exp(1j * p["theta"])

    def h(u):
        dm = p["delta_m_bare"] - p["g_mb"] ** 2 / p["omega_b"] * u
        den = p["g_mc"] ** 2 + (1j * dm + p["kappa_m"]) * x
        return u * abs(den) ** 2 - p["Omega"] ** 2 * abs(x) ** 2

    grid = np.logspace(6, 20, 40001)
    vals = np.array([h(u) for u in grid])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
        roots.append(brentq(h, grid[i], grid[i + 1], xtol=1e-3, rtol=1e-14))
    return roots


@pytest.mark.parametrize(
    "overrides",
    [
        {},  # reference drive: three coexisting solutions
        {"Omega": 2e14},
        {"gain_G": 3.31e6, "theta": math.pi},
        {"gain_G": 3.31e6, "theta": math.pi / 2, "Omega": 4e14},
    ],
)
def test_nonlinear_amplitude_against_root_oracle(overrides):
    p = dict(BASE, **overrides)
    ss = magnon_amplitude(**p)
    oracle = _oracle_intensities(p)
    u = abs(ss.m_avg) ** 2
    # continuation from zero drive lands on the lowest branch
    assert u == pytest.approx(oracle[0], rel=1e-8)
    assert sorted(intensity_roots(**p)) == pytest.approx(oracle, rel=1e-8)
    assert list(ss.other_roots) == pytest.approx(oracle[1:], rel=1e-8)


def test_reference_drive_is_multistable():
    assert len(_oracle_intensities(BASE)) == 3


@pytest.mark.parametrize("overrides", [{}, {"Omega": 2e14}, {"gain_G": 3e6, "theta": 2.0}])
def test_fixed_point_invariants(overrides):
    p = dict(BASE, **overrides)
    ss = magnon_amplitude(**p)
    again, delta_eff = amplitude_map(ss.m_avg, **p)
    assert abs(again - ss.m_avg) <= 1e-10 * abs(ss.m_avg) * 1.5
    assert delta_eff == pytest.approx(ss.delta_m_eff, rel=1e-15)
    u = abs(ss.m_avg) ** 2
    assert ss.q_avg == pytest.approx(-(p["g_mb"] / p["omega_b"]) * u, rel=1e-10)
    assert ss.delta_m_eff == pytest.approx(p["delta_m_bare"] + p["g_mb"] * ss.q_avg, rel=1e-10)
    assert ss.converged


def test_effective_coupling_from_amplitude_near_estimate():
    ss = magnon_amplitude(**BASE)
    G = coupling_from_amplitude(G_MB_SINGLE, ss.m_avg)
    # the sqrt(2) g Omega / omega_b estimate holds to the 10% level at this point
    assert G == pytest.approx(effective_coupling(G_MB_SINGLE, BASE["Omega"], WB), rel=0.1)


def test_non_convergence_reports_last_iterate():
    with pytest.raises(ConvergenceError) as info:
        magnon_amplitude(**BASE, max_iter=3)
    assert info.value.last_iterate is not None
    assert info.value.residual > 1e-10


def test_singular_denominator():
    g = TWO_PI * 3.2e6
    with pytest.raises(SingularityError):
        magnon_amplitude(delta_c=g, delta_m_bare=g, kappa_c=0.0, kappa_m=0.0, g_mc=g,
                         g_mb=0.0, omega_b=WB, gain_G=0.0, theta=0.0, Omega=1e14)


def test_zero_drive():
    ss = magnon_amplitude(**dict(BASE, Omega=0.0))
    assert ss.m_avg == 0 and ss.delta_m_eff == BASE["delta_m_bare"]


def test_low_excitation_flag():
    n = SphereSpec().n_spins
    assert not magnon_amplitude(**BASE, n_spins=n).excitation_warning
    assert magnon_amplitude(**BASE, n_spins=1e10).excitation_warning

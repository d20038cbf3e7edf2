"""Physical constants, parameter records and thermal occupations.

All frequencies and rates are stored as angular quantities (rad/s).  Config
files quote them as ``omega / 2pi`` in Hz, which is what ``from_config``
undoes.  The parametric gain ``G`` is the one exception: it is quoted in
s^-1 and used as-is.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

from .errors import ConfigError, ValidationError

TWO_PI = 2.0 * math.pi

# CODATA 2018
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K

MIN_QUALITY_FACTOR = 1e3


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants used to convert drives and temperatures.

    Only ``gamma_gyro`` may be overridden; ``hbar`` and ``k_B`` are fixed.
    """

    gamma_gyro: float = TWO_PI * 28e9  # rad / (s T)

    @property
    def hbar(self) -> float:
        return HBAR

    @property
    def k_B(self) -> float:
        return K_B

    def __post_init__(self):
        if not self.gamma_gyro > 0:
            raise ValueError("gamma_gyro must be > 0")


@dataclass(frozen=True)
class SphereSpec:
    """YIG sphere geometry and spin content."""

    diameter: float = 250e-6  # m
    spin_density: float = 4.22e27  # m^-3
    spin: float = 2.5

    def __post_init__(self):
        for name in ("diameter", "spin_density", "spin"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def volume(self) -> float:
        return math.pi / 6.0 * self.diameter**3

    @property
    def n_spins(self) -> float:
        return self.spin_density * self.volume


@dataclass(frozen=True)
class SystemParams:
    """Working point of the linearized cavity-magnon-phonon system.

    Attributes
    ----------
    omega_b : float
        Mechanical frequency (rad/s).
    delta_c : float
        Cavity-drive detuning (rad/s).
    delta_m_eff : float
        Effective magnon-drive detuning, including the magnetostrictive shift (rad/s).
    kappa_c, kappa_m : float
        Cavity and magnon dissipation rates (rad/s).
    gamma_b : float
        Mechanical damping rate (rad/s).
    g_mc : float
        Magnon-cavity coupling (rad/s).
    G_mb : float
        Effective magnomechanical coupling magnitude (rad/s).
    gain_G : float
        Parametric amplifier gain (s^-1).
    theta : float
        Parametric pump phase (rad).
    temperature : float
        Bath temperature (K).
    omega_c, omega_m : float
        Bare cavity and magnon frequencies, only used for thermal occupations (rad/s).
    """

    omega_b: float
    delta_c: float
    delta_m_eff: float
    kappa_c: float
    kappa_m: float
    gamma_b: float
    g_mc: float
    G_mb: float
    gain_G: float = 0.0
    theta: float = 0.0
    temperature: float = 0.0
    omega_c: float = TWO_PI * 10e9
    omega_m: float = TWO_PI * 10e9

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ThermalOccupations:
    N_c: float
    N_m: float
    N_b: float


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein mean occupation of a mode at angular frequency ``omega``.

    Returns exactly 0 at ``T == 0``.
    """
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega!r}")
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    if T == 0:
        return 0.0
    x = HBAR * omega / (K_B * T)
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def occupations(params: SystemParams) -> ThermalOccupations:
    T = params.temperature
    return ThermalOccupations(
        N_c=thermal_occupation(params.omega_c, T),
        N_m=thermal_occupation(params.omega_m, T),
        N_b=thermal_occupation(params.omega_b, T),
    )


_POSITIVE = ("omega_b", "kappa_c", "kappa_m", "gamma_b", "omega_c", "omega_m")
_NON_NEGATIVE = ("temperature", "gain_G", "G_mb")


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged if every invariant holds.

    Raises
    ------
    ValidationError
        Listing every violation, not just the first.
    """
    violations = []
    for f in fields(params):
        value = getattr(params, f.name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            violations.append(f"{f.name} must be a finite number")
    if violations:
        raise ValidationError(violations)

    for name in _POSITIVE:
        if not getattr(params, name) > 0:
            violations.append(f"{name} must be > 0")
    for name in _NON_NEGATIVE:
        if getattr(params, name) < 0:
            violations.append(f"{name} must be >= 0")
    if params.omega_b > 0 and params.gamma_b > 0:
        q = params.omega_b / params.gamma_b
        if q < MIN_QUALITY_FACTOR:
            violations.append(
                f"quality factor below threshold (omega_b/gamma_b = {q:.6g} < {MIN_QUALITY_FACTOR:g})"
            )
    if violations:
        raise ValidationError(violations)
    return params


def regime_warnings(params: SystemParams) -> list[str]:
    """Flag working points outside the regime where the drift matrix was derived.

    The linearized drift matrix assumes both detunings dominate the
    dissipation rates and the parametric gain.
    """
    scale = max(params.kappa_c, params.kappa_m, params.gain_G)
    out = []
    if abs(params.delta_c) <= scale:
        out.append("|delta_c| does not exceed max(kappa_c, kappa_m, G)")
    if abs(params.delta_m_eff) <= scale:
        out.append("|delta_m_eff| does not exceed max(kappa_c, kappa_m, G)")
    return out


# config key -> (field name, scale applied on input)
CONFIG_KEYS = {
    "f_c": ("omega_c", TWO_PI),
    "f_m": ("omega_m", TWO_PI),
    "f_b": ("omega_b", TWO_PI),
    "kappa_c": ("kappa_c", TWO_PI),
    "kappa_m": ("kappa_m", TWO_PI),
    "gamma_b": ("gamma_b", TWO_PI),
    "g_mc": ("g_mc", TWO_PI),
    "G_mb": ("G_mb", TWO_PI),
    "delta_c": ("delta_c", TWO_PI),
    "delta_m_eff": ("delta_m_eff", TWO_PI),
    "G": ("gain_G", 1.0),
    "theta": ("theta", 1.0),
    "T": ("temperature", 1.0),
}


def from_config(config: dict) -> SystemParams:
    """Build ``SystemParams`` from a config mapping quoted in Hz (omega/2pi).

    Every key in ``CONFIG_KEYS`` is required; unknown keys are rejected.
    """
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(config) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = [k for k in CONFIG_KEYS if k not in config]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    kwargs = {}
    for key, (name, scale) in CONFIG_KEYS.items():
        value = config[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key {key!r} must be numeric, got {value!r}")
        kwargs[name] = float(value) * scale
    return SystemParams(**kwargs)


def to_config(params: SystemParams) -> dict:
    values = asdict(params)
    return {key: values[name] / scale for key, (name, scale) in CONFIG_KEYS.items()}


BASELINE_CONFIG = {
    "f_c": 10e9,
    "f_m": 10e9,
    "f_b": 10e6,
    "kappa_c": 1e6,
    "kappa_m": 1e6,
    "gamma_b": 1e2,
    "g_mc": 3.2e6,
    "G_mb": 3.2e6,
    "delta_c": -0.9 * 10e6,
    "delta_m_eff": 0.9 * 10e6,
    "G": 0.0,
    "theta": 0.0,
    "T": 0.01,
}


def baseline_params(**changes) -> SystemParams:
    """Reference working point: 10 GHz cavity/magnon, 10 MHz phonon, 10 mK.

    Detunings default to ``delta_c = -0.9 omega_b``, ``delta_m_eff = 0.9 omega_b``.
    """
    return from_config(BASELINE_CONFIG).with_(**changes)

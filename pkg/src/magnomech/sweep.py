"""Point evaluation, parameter grids, temperature scans and optimum search."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np
from scipy import optimize

from . import gaussian
from .dynamics import diffusion_matrix, drift_matrix, stability
from .errors import ConfigError, MagnomechError, NumericError
from .gaussian import CAVITY, MAGNON, PHONON
from .lyapunov import residual, solve_lyapunov
from .model import SystemParams, occupations

MEASURES = ("E_cm", "E_cb", "E_mb", "R_tau_min")
PAIRS = {"E_cm": (CAVITY, MAGNON), "E_cb": (CAVITY, PHONON), "E_mb": (MAGNON, PHONON)}
CSV_HEADER = "x,y,stable,margin,E_cm,E_cb,E_mb,R_tau_min,residual"

NORMALIZED_AXES = {
    "delta_c_over_omega_b": ("delta_c", "omega_b"),
    "delta_m_over_omega_b": ("delta_m_eff", "omega_b"),
    "Gmb_over_gmc": ("G_mb", "g_mc"),
}
PARAM_FIELDS = tuple(f.name for f in fields(SystemParams))
AXIS_NAMES = PARAM_FIELDS + tuple(NORMALIZED_AXES)


@dataclass(frozen=True)
class PointReport:
    """Stability and entanglement at one working point.

    Entanglement fields are ``None`` unless the point is stable;
    ``R_tau_min`` is also ``None`` when it was not requested.
    """

    params: SystemParams
    stable: bool
    margin: float
    marginal: bool = False
    E_cm: Optional[float] = None
    E_cb: Optional[float] = None
    E_mb: Optional[float] = None
    R_tau_min: Optional[float] = None
    lyapunov_residual: Optional[float] = None
    matrices: Optional[dict] = field(default=None, compare=False, repr=False)

    def measure(self, name: str) -> Optional[float]:
        if name not in MEASURES:
            raise ValueError(f"unknown measure {name!r}")
        return getattr(self, name)


def _annotate(exc: MagnomechError, params: SystemParams) -> MagnomechError:
    exc.params = params
    exc.args = (f"{exc.args[0] if exc.args else exc} [at {params}]",) + exc.args[1:]
    return exc


def evaluate_point(params: SystemParams, *, tripartite: bool = False,
                   keep_matrices: bool = False) -> PointReport:
    """Run the full pipeline at one point.

    Occupations, drift and diffusion matrices, stability; then, for stable
    points only, the Lyapunov covariance and the three pairwise
    logarithmic negativities (plus the minimal residual contangle if
    ``tripartite``).
    """
    try:
        A = drift_matrix(params)
        D = diffusion_matrix(params, occupations(params))
        stab = stability(A, params.omega_b)
        mats = {"A": A, "D": D} if keep_matrices else None
        if not stab.stable:
            return PointReport(params, False, stab.margin, stab.marginal, matrices=mats)
        C = solve_lyapunov(A, D, check_stable=False)
        if mats is not None:
            mats["C"] = C
        report = gaussian.physicality_check(C)
        if not report.passed:
            raise gaussian.PhysicalityError(
                f"unphysical covariance (min eig of C + iJ/2 = {report.min_eigenvalue:.3g})"
            )
        values = {
            name: gaussian.log_negativity(C, {a}, {b}, check_physical=False).value
            for name, (a, b) in PAIRS.items()
        }
        r_tau = gaussian.residual_contangle_min(C, check_physical=False) if tripartite else None
        return PointReport(
            params, True, stab.margin, stab.marginal,
            R_tau_min=r_tau, lyapunov_residual=residual(A, C, D), matrices=mats, **values,
        )
    except MagnomechError as exc:
        raise _annotate(exc, params)


def pair_eta(params: SystemParams, measure: str = "E_cm") -> float:
    """Unclamped minimum PT symplectic eigenvalue for one of the pairwise measures."""
    A = drift_matrix(params)
    C = solve_lyapunov(A, diffusion_matrix(params))
    a, b = PAIRS[measure]
    return gaussian.log_negativity(C, {a}, {b}).eta_tilde


def apply_setting(params: SystemParams, name: str, value: float) -> SystemParams:
    """Set a raw field or a normalized axis (e.g. ``delta_c_over_omega_b``)."""
    if name in NORMALIZED_AXES:
        target, unit = NORMALIZED_AXES[name]
        return params.with_(**{target: value * getattr(params, unit)})
    if name in PARAM_FIELDS:
        return params.with_(**{name: float(value)})
    raise ConfigError(f"invalid axis name {name!r}; expected one of {', '.join(AXIS_NAMES)}")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"invalid axis name {self.name!r}")
        if self.count < 2:
            raise ConfigError(f"axis {self.name} needs count >= 2, got {self.count}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:start:stop:count``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"malformed axis {text!r}; expected name:start:stop:count")
        name, start, stop, count = parts
        try:
            return cls(name, float(start), float(stop), int(count))
        except ValueError as exc:
            raise ConfigError(f"malformed axis {text!r}: {exc}") from exc


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    x: Axis
    y: Optional[Axis] = None
    overrides: dict = field(default_factory=dict)
    tripartite: bool = False


@dataclass(frozen=True)
class SweepRow:
    x: float
    y: Optional[float]
    report: PointReport


@dataclass
class SweepTable:
    x_name: str
    y_name: Optional[str]
    rows: list

    def __len__(self):
        return len(self.rows)

    def column(self, measure: str) -> np.ndarray:
        """Measure values as floats, NaN where absent."""
        return np.array([
            np.nan if (v := r.report.measure(measure)) is None else v for r in self.rows
        ])

    def grid(self, measure: str) -> np.ndarray:
        """Reshape a 2-D table to ``(len(x), len(y))``."""
        col = self.column(measure)
        ny = len({r.y for r in self.rows}) if self.y_name else 1
        return col.reshape(-1, ny)


def _base_with_overrides(base, overrides):
    for name, value in overrides.items():
        base = apply_setting(base, name, value)
    return base


def _run(points, fn, threads):
    if threads is None or threads == 1:
        return [fn(p) for p in points]
    workers = (os.cpu_count() or 1) if threads == 0 else threads
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


def grid_sweep(spec: SweepSpec, *, threads: int = 1) -> SweepTable:
    """Evaluate every point of a 1-D or 2-D grid.

    Rows are ordered with the x axis outer and the y axis inner; the order
    does not depend on ``threads`` (0 means one worker per CPU).
    """
    base = _base_with_overrides(spec.base, spec.overrides)
    coords = []
    for x in spec.x.values:
        px = apply_setting(base, spec.x.name, x)
        if spec.y is None:
            coords.append((float(x), None, px))
        else:
            for y in spec.y.values:
                coords.append((float(x), float(y), apply_setting(px, spec.y.name, y)))

    reports = _run([c[2] for c in coords],
                   lambda p: evaluate_point(p, tripartite=spec.tripartite), threads)
    rows = [SweepRow(x, y, rep) for (x, y, _), rep in zip(coords, reports)]
    return SweepTable(spec.x.name, spec.y.name if spec.y else None, rows)


def temperature_scan(params: SystemParams, T_start: float, T_stop: float, count: int, *,
                     tripartite: bool = False, threads: int = 1) -> SweepTable:
    """Evaluate ``params`` at ``count`` evenly spaced temperatures (endpoints included)."""
    if T_start < 0 or T_stop < 0:
        raise ConfigError("temperatures must be >= 0")
    if count < 1:
        raise ConfigError("count must be >= 1")
    temps = np.linspace(T_start, T_stop, count)
    reports = _run([params.with_(temperature=float(T)) for T in temps],
                   lambda p: evaluate_point(p, tripartite=tripartite), threads)
    return SweepTable("temperature", None, [SweepRow(float(T), None, r) for T, r in zip(temps, reports)])


def tripartite_scan(params: SystemParams, axis: Axis, *, threads: int = 1) -> SweepTable:
    """Minimal residual contangle along one axis (usually ``delta_c_over_omega_b``)."""
    return grid_sweep(SweepSpec(params, axis, tripartite=True), threads=threads)


def argmax_measure(table: SweepTable, measure: str) -> tuple:
    """Row with the largest value of ``measure`` among stable rows.

    Ties go to the first row.  Returns ``(row, value)``.
    """
    best, best_val = None, -math.inf
    for row in table.rows:
        v = row.report.measure(measure)
        if v is not None and row.report.stable and v > best_val:
            best, best_val = row, v
    if best is None:
        raise NumericError(f"measure {measure} is absent from every row")
    return best, best_val


def support(table: SweepTable, measure: str, floor: float = 0.0) -> np.ndarray:
    """x values of rows where ``measure > floor``."""
    col = table.column(measure)
    xs = np.array([r.x for r in table.rows])
    return xs[np.nan_to_num(col, nan=-np.inf) > floor]


def vanishing_temperature(params: SystemParams, measure: str = "E_cm", *,
                          T_lo: float = 0.0, T_hi: float = 1.0, xtol: float = 1e-6) -> float:
    """Temperature at which a pairwise logarithmic negativity reaches zero.

    Root of ``2 eta(T) - 1`` by Brent's method; the measure must be positive
    at ``T_lo`` and zero at ``T_hi``.
    """
    def f(T):
        return 2.0 * pair_eta(params.with_(temperature=T), measure) - 1.0

    f_lo, f_hi = f(T_lo), f(T_hi)
    if not (f_lo < -2.0 * gaussian.ZERO_TOL and f_hi >= 0):
        raise NumericError(f"{measure} does not vanish between {T_lo} K and {T_hi} K")
    return optimize.brentq(f, T_lo, T_hi, xtol=xtol)


def refine_optimum(params: SystemParams, measure: str = "E_cm", *,
                   axes=("delta_c_over_omega_b", "delta_m_over_omega_b"),
                   start=None, xatol: float = 1e-4) -> tuple:
    """Local Nelder-Mead refinement of a measure over two normalized axes.

    ``start`` defaults to the current normalized values in ``params``.
    Unstable points score zero.  Returns ``(params_at_optimum, value)``.
    """
    if start is None:
        start = []
        for name in axes:
            target, unit = NORMALIZED_AXES[name]
            start.append(getattr(params, target) / getattr(params, unit))

    def at(v):
        p = params
        for name, val in zip(axes, v):
            p = apply_setting(p, name, float(val))
        return p

    def objective(v):
        value = evaluate_point(at(v), tripartite=measure == "R_tau_min").measure(measure)
        return -(value or 0.0)

    res = optimize.minimize(objective, np.asarray(start, dtype=float), method="Nelder-Mead",
                            options={"xatol": xatol, "fatol": 1e-10})
    best = at(res.x)
    return best, -objective(res.x)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return format(float(v), ".9g")


def table_to_csv(table: SweepTable) -> str:
    lines = [CSV_HEADER]
    for row in table.rows:
        rep = row.report
        lines.append(",".join(_fmt(v) for v in (
            row.x, row.y, rep.stable, rep.margin, rep.E_cm, rep.E_cb, rep.E_mb,
            rep.R_tau_min, rep.lyapunov_residual,
        )))
    return "\n".join(lines) + "\n"


def summarize(table: SweepTable) -> list[str]:
    """One line per available measure: maximum and where it occurs."""
    out = []
    for name in MEASURES:
        try:
            row, value = argmax_measure(table, name)
        except NumericError:
            continue
        loc = f"{table.x_name}={row.x:.6g}"
        if table.y_name:
            loc += f", {table.y_name}={row.y:.6g}"
        out.append(f"max {name} = {value:.6g} at {loc}")
    stable = sum(r.report.stable for r in table.rows)
    out.append(f"{stable}/{len(table)} points stable")
    return out

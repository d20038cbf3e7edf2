"""Entanglement measures for Gaussian states given by their covariance matrix.

Conventions: quadratures ordered ``(x_1, p_1, x_2, p_2, ...)``, vacuum
variance 1/2, symplectic form ``J = diag([[0, 1], [-1, 0]], ...)``.  Modes
are labelled from 1, so for the full system 1 = cavity, 2 = magnon,
3 = mechanics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import MonogamyError, NumericError, PhysicalityError

CAVITY, MAGNON, PHONON = 1, 2, 3

PHYSICALITY_TOL = 1e-9
PAIRING_TOL = 1e-9
ZERO_TOL = 1e-12
MONOGAMY_TOL = 1e-9
CROSS_CHECK_TOL = 1e-6


@dataclass(frozen=True)
class ModePartition:
    side_a: frozenset
    side_b: frozenset

    def __init__(self, side_a, side_b):
        a, b = frozenset(side_a), frozenset(side_b)
        if not a or not b:
            raise ValueError("both sides of a partition must be nonempty")
        if a & b:
            raise ValueError("partition sides must be disjoint")
        if not (a | b) <= {1, 2, 3}:
            raise ValueError("modes must be drawn from {1, 2, 3}")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)


@dataclass(frozen=True)
class EntanglementResult:
    value: float
    eta_tilde: float


@dataclass(frozen=True)
class PhysicalityReport:
    passed: bool
    min_eigenvalue: float


@lru_cache(maxsize=None)
def _symplectic_form(n_modes: int) -> np.ndarray:
    J = np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    J.flags.writeable = False
    return J


def symplectic_form(n_modes: int) -> np.ndarray:
    return _symplectic_form(n_modes).copy()


def _n_modes(C) -> int:
    n = C.shape[0]
    if C.ndim != 2 or C.shape[1] != n or n % 2:
        raise ValueError(f"covariance matrix must be square with even size, got {C.shape}")
    return n // 2


def reduce(C: np.ndarray, modes) -> np.ndarray:
    """Sub-covariance of the selected modes, keeping their original order."""
    n = _n_modes(C)
    modes = sorted(set(modes))
    if not modes:
        raise ValueError("mode set must be nonempty")
    if modes[0] < 1 or modes[-1] > n:
        raise ValueError(f"modes must lie in 1..{n}, got {modes}")
    idx = [k for m in modes for k in (2 * m - 2, 2 * m - 1)]
    return C[np.ix_(idx, idx)]


def partial_transpose(C: np.ndarray, mode) -> np.ndarray:
    """Flip the momentum sign of one mode (or of each mode in an iterable)."""
    n = _n_modes(C)
    modes = [mode] if isinstance(mode, (int, np.integer)) else list(mode)
    sign = np.ones(2 * n)
    for m in modes:
        if not 1 <= m <= n:
            raise ValueError(f"mode {m} out of range 1..{n}")
        sign[2 * m - 1] = -1.0
    return C * np.outer(sign, sign)


def symplectic_eigenvalues(C: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a symmetric 2k x 2k matrix, ascending.

    These are the ``nu`` with ``eig(J C) = +-i nu``.

    Raises
    ------
    NumericError
        If the spectrum of ``J C`` does not come in imaginary ``+-`` pairs.
    """
    n = _n_modes(C)
    ev = np.linalg.eigvals(_symplectic_form(n) @ C)
    scale = max(1.0, float(np.max(np.abs(ev))))
    if np.max(np.abs(ev.real)) > PAIRING_TOL * scale:
        raise NumericError("symplectic pairing failed: eigenvalues of J C are not imaginary")
    im = np.sort(ev.imag)
    pos, neg = im[n:], -im[:n][::-1]
    if np.max(np.abs(pos - neg)) > PAIRING_TOL * scale or np.any(pos <= 0):
        raise NumericError("symplectic pairing failed: eigenvalues do not pair as +-i nu")
    return pos


def physicality_check(C: np.ndarray) -> PhysicalityReport:
    """Test the uncertainty relation ``C + (i/2) J >= 0``."""
    n = _n_modes(C)
    lam = float(np.linalg.eigvalsh(C + 0.5j * _symplectic_form(n))[0])
    return PhysicalityReport(passed=lam >= -PHYSICALITY_TOL, min_eigenvalue=lam)


def two_mode_eta(V: np.ndarray) -> float:
    """Minimum symplectic eigenvalue of the partial transpose of a two-mode CM.

    Closed form from the 2x2 block invariants, written in the rationalized
    form to avoid cancellation when the local blocks are very noisy.
    """
    if V.shape != (4, 4):
        raise ValueError("two_mode_eta needs a 4x4 covariance matrix")
    det_a = np.linalg.det(V[:2, :2])
    det_b = np.linalg.det(V[2:, 2:])
    det_c = np.linalg.det(V[:2, 2:])
    det_v = np.linalg.det(V)
    sigma = det_a + det_b - 2.0 * det_c
    disc = sigma * sigma - 4.0 * det_v
    return math.sqrt(2.0 * det_v / (sigma + math.sqrt(max(disc, 0.0))))


def _eta_tilde(C, side_a, side_b, check_physical):
    modes = sorted(set(side_a) | set(side_b))
    V = reduce(C, modes)
    if check_physical:
        report = physicality_check(V)
        if not report.passed:
            raise PhysicalityError(
                f"unphysical covariance (min eig of C + iJ/2 = {report.min_eigenvalue:.3g})"
            )
    flipped = [modes.index(m) + 1 for m in side_a]
    Vt = partial_transpose(V, flipped)
    eta = float(symplectic_eigenvalues(Vt)[0])
    if len(modes) == 2:
        closed = two_mode_eta(V)
        if abs(closed - eta) > CROSS_CHECK_TOL * max(eta, 1e-12):
            raise NumericError(f"two-mode cross-check failed: {eta!r} vs closed form {closed!r}")
    return eta


def log_negativity(C: np.ndarray, side_a, side_b=None, *, check_physical: bool = True) -> EntanglementResult:
    """Logarithmic negativity ``max(0, -ln 2 eta)`` across a bipartition.

    ``side_a`` may be a :class:`ModePartition`; otherwise ``side_a`` and
    ``side_b`` are mode-label iterables (or single labels).  The CM is
    reduced to the union of both sides and the modes of ``side_a`` are
    partially transposed.
    """
    if isinstance(side_a, ModePartition):
        side_a, side_b = side_a.side_a, side_a.side_b
    side_a = {side_a} if isinstance(side_a, (int, np.integer)) else set(side_a)
    side_b = {side_b} if isinstance(side_b, (int, np.integer)) else set(side_b)
    eta = _eta_tilde(C, side_a, side_b, check_physical)
    if eta >= 0.5 - ZERO_TOL:
        return EntanglementResult(0.0, eta)
    return EntanglementResult(-math.log(2.0 * eta), eta)


def contangle(C: np.ndarray, side_a, side_b=None, *, check_physical: bool = True) -> float:
    """Contangle, taken as the squared logarithmic negativity."""
    return log_negativity(C, side_a, side_b, check_physical=check_physical).value ** 2


_LABELS = {CAVITY: "c", MAGNON: "m", PHONON: "b"}


def residual_contangles(C: np.ndarray, *, check_physical: bool = True) -> dict:
    """Unclamped residual contangles ``C_{i|jk} - C_{i|j} - C_{i|k}`` of a 3-mode CM.

    Keys are ``"c|mb"``, ``"m|cb"`` and ``"b|cm"``.
    """
    if C.shape != (6, 6):
        raise ValueError("residual contangles need a 6x6 covariance matrix")
    if check_physical:
        report = physicality_check(C)
        if not report.passed:
            raise PhysicalityError(
                f"unphysical covariance (min eig of C + iJ/2 = {report.min_eigenvalue:.3g})"
            )
    out = {}
    for i in (CAVITY, MAGNON, PHONON):
        j, k = (m for m in (CAVITY, MAGNON, PHONON) if m != i)
        whole = contangle(C, {i}, {j, k}, check_physical=False)
        pair_j = contangle(C, {i}, {j}, check_physical=False)
        pair_k = contangle(C, {i}, {k}, check_physical=False)
        out[f"{_LABELS[i]}|{_LABELS[j]}{_LABELS[k]}"] = whole - pair_j - pair_k
    return out


def residual_contangle_min(C: np.ndarray, *, check_physical: bool = True) -> float:
    """Minimal residual contangle; positive values certify genuine tripartite entanglement.

    Residuals in ``[-1e-9, 0)`` are treated as roundoff and clamped to 0.

    Raises
    ------
    MonogamyError
        If any residual is below ``-1e-9``.
    """
    res = residual_contangles(C, check_physical=check_physical)
    for key, r in res.items():
        if r < -MONOGAMY_TOL:
            raise MonogamyError(f"monogamy violated for {key}: residual {r:.3g}")
    return min(max(r, 0.0) for r in res.values())

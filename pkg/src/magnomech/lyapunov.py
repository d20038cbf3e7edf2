"""Steady-state covariance from the Lyapunov equation ``A C + C A^T = -D``."""

from __future__ import annotations

import numpy as np

from .errors import NumericError, PreconditionError


def solve_lyapunov(A: np.ndarray, D: np.ndarray, *, check_stable: bool = True) -> np.ndarray:
    """Solve ``A C + C A^T = -D`` for the stationary covariance ``C``.

    Uses the vectorized form ``(I kron A + A kron I) vec(C) = -vec(D)``
    (column-major ``vec``), a dense n^2 x n^2 system, then symmetrizes.

    Raises
    ------
    PreconditionError
        If ``A`` has an eigenvalue with non-negative real part.
    NumericError
        If the Kronecker-sum system is numerically singular.
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    if check_stable:
        margin = np.max(np.linalg.eigvals(A).real)
        if not margin < 0:
            raise PreconditionError(f"drift matrix is not stable (max Re eig = {margin:.6g})")
    eye = np.eye(n)
    K = np.kron(eye, A) + np.kron(A, eye)
    try:
        vec = np.linalg.solve(K, -D.reshape(-1, order="F"))
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(K)
        raise NumericError(f"singular Lyapunov system (condition estimate {cond:.3g})") from exc
    if not np.all(np.isfinite(vec)):
        cond = np.linalg.cond(K)
        raise NumericError(f"ill-conditioned Lyapunov system (condition estimate {cond:.3g})")
    C = vec.reshape((n, n), order="F")
    return 0.5 * (C + C.T)


def residual(A: np.ndarray, C: np.ndarray, D: np.ndarray) -> float:
    """Relative Frobenius residual ``||A C + C A^T + D|| / ||D||``."""
    r = A @ C + C @ A.T + D
    return float(np.linalg.norm(r) / np.linalg.norm(D))

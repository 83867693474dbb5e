"""Small complex matrix utilities shared by the grating and cavity solvers.

Everything here operates on plain numpy arrays: 2x2 complex matrices for the
mode-pair (w, w†) transformations and 4x4 systems for boundary-condition
solves. Mode-pair matrices of the form [[a, b], [b*, a*]] are referred to as
Bogoliubov-form throughout.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

ComplexMatrix = NDArray[np.complex128]


class SingularResolvent(ValueError):
    """(I - M) is singular: feedback loop at or above oscillation threshold."""


class IllConditioned(ValueError):
    """Linear system too ill-conditioned to trust (degenerate eigenbasis)."""


def bogoliubov(alpha: complex, beta: complex) -> ComplexMatrix:
    """Build [[alpha, beta], [beta*, alpha*]]."""
    return np.array([[alpha, beta], [np.conj(beta), np.conj(alpha)]], dtype=complex)


def is_bogoliubov(m: ComplexMatrix, tol: float = 1e-12) -> bool:
    """Check the conjugate-pair structure entrywise against a scaled tolerance."""
    scale = max(1.0, float(np.max(np.abs(m))))
    return (abs(m[1, 0] - np.conj(m[0, 1])) <= tol * scale
            and abs(m[1, 1] - np.conj(m[0, 0])) <= tol * scale)


def multiply(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Matrix product (kept as a named operation for the algebra tests)."""
    return a @ b


def resolvent(m: ComplexMatrix, det_tol: float = 1e-12) -> ComplexMatrix:
    """Return (I - m)^-1, raising SingularResolvent near det(I - m) = 0."""
    q = np.eye(m.shape[0], dtype=complex) - m
    det = np.linalg.det(q)
    scale = max(1.0, float(np.max(np.abs(q))) ** q.shape[0])
    if abs(det) <= det_tol * scale:
        raise SingularResolvent(
            f"det(I - M) = {det:.3e}; loop gain at or above threshold")
    return np.linalg.inv(q)


def solve_linear_4(a: ComplexMatrix, rhs: NDArray[np.complex128],
                   cond_bound: float = 1e12) -> NDArray[np.complex128]:
    """Solve a 4x4 complex system with a conditioning guard.

    Raises IllConditioned when cond(a) exceeds `cond_bound` or the residual
    cannot be pushed below 1e-10 * ||rhs|| by one step of refinement.
    """
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > cond_bound:
        raise IllConditioned(f"cond(A) = {cond:.3e} exceeds {cond_bound:.1e}")
    x = np.linalg.solve(a, rhs)
    rhs_norm = np.linalg.norm(rhs)
    tol = 1e-10 * max(rhs_norm, 1e-300)
    res = rhs - a @ x
    if np.linalg.norm(res) > tol:
        x = x + np.linalg.solve(a, res)
        res = rhs - a @ x
        if np.linalg.norm(res) > tol:
            raise IllConditioned(
                f"residual {np.linalg.norm(res):.3e} > {tol:.3e} after refinement")
    return x


def commutation_metric(n_modes: int) -> NDArray[np.float64]:
    """diag(+1, -1, ...) pattern for stacked (w, w†) mode vectors.

    This is the invariant metric of maps between vectors of independent
    canonical modes (e.g. the assembled input -> output scattering matrix).
    """
    return np.diag([1.0 if i % 2 == 0 else -1.0 for i in range(2 * n_modes)])


def flux_metric() -> NDArray[np.float64]:
    """diag(+1, -1, -1, +1): net photon flux through a cross-section.

    A two-point transfer matrix of counter-propagating pairs (a, a†, b, b†)
    preserves this metric rather than the commutation metric: the backward
    pair carries flux against +z, and the same-z components are not mutually
    independent canonical modes.
    """
    return np.diag([1.0, -1.0, -1.0, 1.0])


def metric_residual(t: ComplexMatrix, metric: NDArray | None = None) -> float:
    """Max |T G T† - G| entry: metric-preservation defect of a mode map."""
    g = metric if metric is not None else commutation_metric(t.shape[0] // 2)
    return float(np.max(np.abs(t @ g @ t.conj().T - g)))

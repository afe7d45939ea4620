"""
Regularized inverses and symmetric roots of PSD matrices.

All powers go through one checked eigendecomposition so that the inverse,
the inverse square root and the square root of a matrix agree with each
other under the same InversionMode.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from foldkit.config import settings
from foldkit.core.exceptions import MatrixPropertyError, SingularityError
from foldkit.linalg.schemas import InversionMode

logger = logging.getLogger(__name__)

NEGATIVE_EIGEN_TOL = 1e-8

_REMEDY = "--inversion ridge --epsilon E or --inversion pinv"


def _checked_eigh(S: np.ndarray, name: str = "matrix") -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric PSD matrix with small negative eigenvalues clamped."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise MatrixPropertyError(f"{name} must be square, got shape {S.shape}")

    norm = np.linalg.norm(S)
    if np.linalg.norm(S - S.T) > settings.symmetry_tol * max(norm, 1e-300):
        raise MatrixPropertyError(f"{name} is not symmetric")

    eigvals, eigvecs = linalg.eigh((S + S.T) / 2.0)
    scale = max(abs(eigvals[-1]), abs(eigvals[0]))
    if eigvals[0] < -NEGATIVE_EIGEN_TOL * scale:
        raise MatrixPropertyError(
            f"{name} is not positive semidefinite (smallest eigenvalue {eigvals[0]:.3e})"
        )
    return np.clip(eigvals, 0.0, None), eigvecs


def _spectral_power(S: np.ndarray, mode: InversionMode, power: float, name: str) -> np.ndarray:
    eigvals, eigvecs = _checked_eigh(S, name)
    lam_max = eigvals[-1]

    if mode.kind == "ridge":
        shifted = eigvals + mode.shift
        scaled = shifted ** power
    elif mode.kind == "pinv":
        keep = eigvals > mode.rank_tol * lam_max if lam_max > 0 else np.zeros_like(eigvals, dtype=bool)
        scaled = np.zeros_like(eigvals)
        scaled[keep] = eigvals[keep] ** power
    else:
        if lam_max <= 0 or eigvals[0] < settings.singular_tol * lam_max:
            raise SingularityError(
                f"{name} is singular under exact inversion "
                f"(condition ratio {eigvals[0] / lam_max if lam_max > 0 else 0.0:.3e})",
                remedy=_REMEDY,
            )
        scaled = eigvals ** power

    result = (eigvecs * scaled) @ eigvecs.T
    return (result + result.T) / 2.0


def regularized_inverse(S: np.ndarray, mode: InversionMode, name: str = "matrix") -> np.ndarray:
    """
    Inverse of a symmetric PSD matrix under the given mode.

    Args:
        S: Symmetric PSD matrix
        mode: exact, pinv or ridge
        name: Label used in error messages

    Returns:
        S^-1, the Moore-Penrose inverse, or (S + eps I)^-1

    Raises:
        MatrixPropertyError: S is not symmetric PSD within tolerance
        SingularityError: exact mode on a singular S
    """
    return _spectral_power(S, mode, -1.0, name)


def inverse_sqrt(S: np.ndarray, mode: InversionMode, name: str = "matrix") -> np.ndarray:
    """Symmetric inverse square root under the given mode."""
    return _spectral_power(S, mode, -0.5, name)


def psd_sqrt(S: np.ndarray, mode: Optional[InversionMode] = None, name: str = "matrix") -> np.ndarray:
    """
    Symmetric square root of S (of S + eps I in ridge mode).

    Never raises for singularity; the root of a singular PSD matrix exists.
    """
    mode = mode or InversionMode.pseudo()
    eigvals, eigvecs = _checked_eigh(S, name)
    root = np.sqrt(eigvals + mode.shift)
    result = (eigvecs * root) @ eigvecs.T
    return (result + result.T) / 2.0


def solve_normal(N: np.ndarray, rhs: np.ndarray, mode: InversionMode, name: str = "normal matrix") -> np.ndarray:
    """
    Solve the least-squares normal equations N x = rhs.

    A rank-deficient N (a factor that lost rank mid-iteration) gets the
    minimum-norm least-squares solution in every mode; it is still an exact
    minimizer of the underlying quadratic. exact mode only refuses an N that
    vanishes altogether, i.e. a factor collapsed to zero.
    """
    N = (np.asarray(N, dtype=float) + np.asarray(N, dtype=float).T) / 2.0
    if mode.kind == "exact":
        eigvals = linalg.eigvalsh(N)
        if eigvals[-1] <= 0:
            raise SingularityError(f"{name} vanishes; a fitted factor collapsed to zero")
        if eigvals[0] >= settings.singular_tol * eigvals[-1]:
            return linalg.solve(N, rhs, assume_a="sym")
        logger.debug(f"{name} is rank deficient, using the minimum-norm solution")
        return linalg.pinvh(N, rtol=settings.singular_tol) @ rhs
    return linalg.pinvh(N, rtol=mode.rank_tol) @ rhs


def covariance_factors(
    S: np.ndarray, mode: InversionMode, name: str = "covariance"
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Working covariance and its powers under one inversion mode.

    The working covariance is S itself, or S + eps I in ridge mode.

    Returns:
        (working, working^{1/2}, working^{-1/2}, working^{-1}); the inverse
        powers are Moore-Penrose in pinv mode.
    """
    S = np.asarray(S, dtype=float)
    working = S + mode.shift * np.eye(S.shape[0]) if mode.kind == "ridge" else S
    plain = mode if mode.kind == "exact" else InversionMode.pseudo(mode.rank_tol)
    root = psd_sqrt(working, plain, name)
    inv_root = inverse_sqrt(working, plain, name)
    inv = regularized_inverse(working, plain, name)
    return working, root, inv_root, inv

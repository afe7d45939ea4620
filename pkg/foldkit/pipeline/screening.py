"""
Spectral pre-screening of large matrix predictors.

X_i is replaced by V' X_i W, where V holds the leading eigenvectors of the
pooled left scatter E_n (X - X_bar)(X - X_bar)' and W those of the right
scatter E_n (X - X_bar)'(X - X_bar).
"""

import logging
from typing import Tuple

import numpy as np
from scipy import linalg

from foldkit.core.exceptions import DimensionError
from foldkit.moments.schemas import SampleSet
from foldkit.pipeline.schemas import ScreenBases

logger = logging.getLogger(__name__)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of every column positive (first index on ties)."""
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _leading_eigenvectors(scatter: np.ndarray, count: int, side: str) -> Tuple[np.ndarray, np.ndarray]:
    eigvals, eigvecs = linalg.eigh(scatter)
    order = np.argsort(-eigvals, kind="stable")
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]

    rank = int(np.sum(eigvals > 1e-12 * max(eigvals[0], 1e-300)))
    if count > rank:
        logger.warning(f"⚠️ {side} screening keeps {count} directions but the scatter has rank {rank}")
    return _fix_signs(eigvecs[:, :count]), eigvals[:count]


def prescreen(samples: SampleSet, sl: int, sr: int) -> Tuple[ScreenBases, SampleSet]:
    """
    Reduce every X_i to the sL x sR matrix V' X_i W.

    Args:
        samples: The sample (n >= 2)
        sl: Number of left directions kept (<= pL)
        sr: Number of right directions kept (<= pR)

    Returns:
        (ScreenBases, reduced SampleSet with the same responses and ids)

    Raises:
        DimensionError: If sL > pL or sR > pR
    """
    if not (1 <= sl <= samples.pl and 1 <= sr <= samples.pr):
        raise DimensionError(f"screen sizes ({sl}, {sr}) must lie within ({samples.pl}, {samples.pr})")

    centered = samples.X - samples.X.mean(axis=0)
    left_scatter = np.einsum("iab,icb->ac", centered, centered) / samples.n
    right_scatter = np.einsum("iab,iac->bc", centered, centered) / samples.n

    left, left_vals = _leading_eigenvectors(left_scatter, sl, "left")
    right, right_vals = _leading_eigenvectors(right_scatter, sr, "right")
    bases = ScreenBases(left=left, right=right, left_eigenvalues=left_vals, right_eigenvalues=right_vals)

    logger.info(f"📥 Pre-screened {samples.pl}x{samples.pr} predictors to {sl}x{sr}")
    return bases, samples.with_matrices(apply_screen(bases, samples.X))


def apply_screen(bases: ScreenBases, X: np.ndarray) -> np.ndarray:
    """V' X W for one matrix or an (n, pL, pR) stack."""
    X = np.asarray(X, dtype=float)
    if X.shape[-2:] != (bases.left.shape[0], bases.right.shape[0]):
        raise DimensionError(f"cannot screen matrices of shape {X.shape[-2:]}")
    return bases.left.T @ X @ bases.right

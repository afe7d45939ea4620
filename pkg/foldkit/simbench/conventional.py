"""
Conventional (unfolded) SIR, SAVE and DR on vec(X).

These baselines ignore the matrix structure: they take the top-d
eigenvectors of the method's candidate matrix in the standardized scale
and map them back with cov^{-1/2}.
"""

import logging
from typing import Optional

import numpy as np
from scipy import linalg

from foldkit.core.exceptions import DimensionError, SingularityError
from foldkit.linalg.schemas import InversionMode, SubspaceBasis
from foldkit.moments.schemas import MomentTargets, SampleSet
from foldkit.moments.targets import Method, build_targets

logger = logging.getLogger(__name__)


def candidate_matrix(targets: MomentTargets) -> np.ndarray:
    """
    sum_j w_j T_j T_j' over the standardized targets.

    SIR: sum_l p_l m_l m_l'. SAVE and DR: sum_j w_j M_j^2 (the targets are symmetric).
    """
    kernel = np.einsum("j,jpk,jqk->pq", targets.weights, targets.matrices, targets.matrices)
    return (kernel + kernel.T) / 2.0


def conventional_fit(
    samples: SampleSet,
    method: Method,
    s: Optional[int],
    d: int,
    mode: Optional[InversionMode] = None,
) -> SubspaceBasis:
    """
    Estimate a d-dimensional reduction subspace of vec(X).

    SIR keeps at most s - 1 directions, the rank bound of its candidate
    matrix; a larger request is logged and capped.

    Args:
        samples: The sample
        method: "sir", "save" or "dr"
        s: Number of slices (ignored for categorical responses)
        d: Requested dimension
        mode: Inversion mode for Sigma

    Returns:
        SubspaceBasis in R^{pR*pL}

    Raises:
        DimensionError: d outside 1..pR*pL
        SingularityError: Singular covariance in exact mode
    """
    mode = mode or InversionMode.exact()
    P = samples.pl * samples.pr
    if not 1 <= d <= P:
        raise DimensionError(f"conventional dimension d={d} must lie in 1..{P}")

    targets = build_targets(samples, method, s, mode)
    if method == "sir" and d > targets.count - 1:
        capped = max(targets.count - 1, 1)
        logger.warning(f"⚠️ Conventional SIR has at most {targets.count - 1} directions; using d={capped} instead of {d}")
        d = capped

    eigvals, eigvecs = linalg.eigh(candidate_matrix(targets))
    order = np.argsort(-eigvals, kind="stable")[:d]
    directions = targets.cov_inv_root @ eigvecs[:, order]

    if np.linalg.matrix_rank(directions, tol=1e-12 * max(np.abs(directions).max(), 1.0)) < d:
        raise SingularityError(
            "back-transformed directions are rank deficient", remedy="--inversion ridge --epsilon E"
        )
    logger.debug(f"Conventional {method.upper()} kept {d} of {P} directions")
    return SubspaceBasis(matrix=directions)

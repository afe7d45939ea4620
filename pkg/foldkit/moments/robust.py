"""
Robust item weights that shrink the influence of outlying matrices.
"""

import logging
from typing import Optional

import numpy as np

from foldkit.linalg.inversion import regularized_inverse
from foldkit.linalg.schemas import InversionMode
from foldkit.moments.schemas import RobustWeights, SampleSet
from foldkit.moments.targets import sample_cov

logger = logging.getLogger(__name__)


def mahalanobis_distances(samples: SampleSet, mode: Optional[InversionMode] = None) -> np.ndarray:
    """Quadratic forms (v_i - v_bar)' Sigma^-1 (v_i - v_bar) with the unweighted Sigma."""
    mode = mode or InversionMode.exact()
    V = samples.vectors()
    Vc = V - V.mean(axis=0)
    sigma_inv = regularized_inverse(sample_cov(samples), mode, "covariance")
    return np.einsum("ip,pq,iq->i", Vc, sigma_inv, Vc)


def robust_weights(
    samples: SampleSet,
    cutoff_quantile: float,
    mode: Optional[InversionMode] = None,
) -> RobustWeights:
    """
    Huber-type weights w_i proportional to min(1, c / d_i).

    d_i is the Mahalanobis quadratic form of item i and c the empirical
    `cutoff_quantile` of the d_i. Weights are renormalized to sum to 1.

    Args:
        samples: The sample
        cutoff_quantile: Quantile of the distances used as cutoff, in (0, 1]
        mode: Inversion mode for Sigma

    Returns:
        RobustWeights; uniform when every d_i is 0
    """
    if not 0.0 < cutoff_quantile <= 1.0:
        raise ValueError(f"cutoff_quantile must lie in (0, 1], got {cutoff_quantile}")

    d = mahalanobis_distances(samples, mode)
    if np.all(d <= 0):
        logger.warning("⚠️ All Mahalanobis distances are zero; using uniform weights")
        return RobustWeights(w=np.ones(samples.n), cutoff_quantile=cutoff_quantile, cutoff=0.0)

    c = float(np.quantile(d, cutoff_quantile))
    raw = np.ones(samples.n)
    outside = d > c
    raw[outside] = c / d[outside]
    if raw.sum() <= 0:
        raw = np.ones(samples.n)

    downweighted = int(outside.sum())
    logger.info(f"📊 Robust weights: cutoff {c:.4g} at quantile {cutoff_quantile}, {downweighted} items downweighted")
    return RobustWeights(w=raw, cutoff_quantile=cutoff_quantile, cutoff=c)

"""
Synthetic matrix-predictor data with a known dimension-folding subspace.
"""

import logging
from typing import Tuple

import numpy as np

from foldkit.linalg.schemas import SubspaceBasis
from foldkit.moments.schemas import SampleSet
from foldkit.simbench.schemas import MixtureModelSpec

logger = logging.getLogger(__name__)


def class_parameters(spec: MixtureModelSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-class means and standard deviations, each of shape (2, p, p).

    Index 0 is the Y=0 class, index 1 the Y=1 class.
    """
    p = spec.p
    means = np.zeros((2, p, p))
    means[1, 0, 0] = means[1, 1, 1] = spec.mu

    sds = np.ones((2, p, p))
    for i, j in spec.variance_cells:
        sds[0, i, j] = np.sqrt(spec.sigma2)
        sds[1, i, j] = np.sqrt(spec.tau2)
    return means, sds


def true_bases(spec: MixtureModelSpec) -> Tuple[SubspaceBasis, SubspaceBasis]:
    """Left and right factors (e1, e2) of the true folding subspace."""
    e12 = np.eye(spec.p)[:, :2]
    return SubspaceBasis(matrix=e12), SubspaceBasis(matrix=e12)


def gen_mixture(
    spec: MixtureModelSpec, n: int, rng: np.random.Generator
) -> Tuple[SampleSet, SubspaceBasis, SubspaceBasis]:
    """
    Draw n i.i.d. (X, Y) pairs from the mixture.

    Responses are drawn first, then the predictor noise, so the stream
    layout is fixed for a given (n, p).

    Args:
        spec: Model parameters
        n: Sample size (>= 2)
        rng: Seeded generator

    Returns:
        (categorical SampleSet, true left basis, true right basis)
    """
    y = (rng.random(n) < spec.pi).astype(int)
    noise = rng.standard_normal((n, spec.p, spec.p))
    means, sds = class_parameters(spec)
    X = means[y] + sds[y] * noise

    left, right = true_bases(spec)
    logger.debug(f"Generated {spec.variant} sample: n={n}, p={spec.p}, {int(y.sum())} with Y=1")
    return SampleSet(X=X, y=y.astype(float), response_kind="categorical"), left, right

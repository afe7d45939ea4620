"""
Projections and distances between subspaces.

Distances are ||P1 - P2|| between orthogonal projections, the criterion
used to score every estimated dimension-folding space.
"""

import logging
import math
from typing import Literal, Tuple, Union

import numpy as np
from scipy import linalg

from foldkit.config import settings
from foldkit.core.exceptions import DimensionError
from foldkit.linalg.schemas import SubspaceBasis

logger = logging.getLogger(__name__)

BasisLike = Union[SubspaceBasis, np.ndarray]


def _as_matrix(basis: BasisLike) -> np.ndarray:
    if isinstance(basis, SubspaceBasis):
        return basis.matrix
    m = np.asarray(basis, dtype=float)
    return m.reshape(-1, 1) if m.ndim == 1 else m


def _orthonormal(basis: BasisLike) -> np.ndarray:
    # SVD-based range; numerically equal to B (B'B)^+ B' for rank-deficient B
    m = _as_matrix(basis)
    return linalg.orth(m, rcond=settings.rank_tol)


def projection(basis: BasisLike) -> np.ndarray:
    """
    Orthogonal projection onto the column span of `basis`.

    Rank-deficient input is accepted; the projection is onto its range.

    Example:
        >>> projection(np.eye(3)[:, :1])
        array([[1., 0., 0.],
               [0., 0., 0.],
               [0., 0., 0.]])
    """
    q = _orthonormal(basis)
    p = q @ q.T
    return (p + p.T) / 2.0


def subspace_distance(
    first: BasisLike,
    second: BasisLike,
    norm: Literal["fro", "spectral"] = "fro",
) -> float:
    """
    ||P_first - P_second|| in the Frobenius (default) or spectral norm.

    Raises:
        DimensionError: If the ambient dimensions differ
    """
    m1, m2 = _as_matrix(first), _as_matrix(second)
    if m1.shape[0] != m2.shape[0]:
        raise DimensionError(f"ambient dimensions differ: {m1.shape[0]} vs {m2.shape[0]}")
    diff = projection(m1) - projection(m2)
    if norm == "spectral":
        return float(np.linalg.norm(diff, 2))
    return float(np.linalg.norm(diff, "fro"))


def kron_projection_distance(
    a1: BasisLike, b1: BasisLike, a2: BasisLike, b2: BasisLike
) -> float:
    """
    ||P_{b1 kron a1} - P_{b2 kron a2}||_F without forming the big projections.

    Uses P_{b kron a} = P_b kron P_a and tr(P kron Q) = tr(P) tr(Q).
    """
    qa1, qb1, qa2, qb2 = (_orthonormal(x) for x in (a1, b1, a2, b2))
    if qa1.shape[0] != qa2.shape[0] or qb1.shape[0] != qb2.shape[0]:
        raise DimensionError("factor ambient dimensions differ")
    overlap_a = float(np.sum((qa1.T @ qa2) ** 2))
    overlap_b = float(np.sum((qb1.T @ qb2) ** 2))
    dim1 = qa1.shape[1] * qb1.shape[1]
    dim2 = qa2.shape[1] * qb2.shape[1]
    return math.sqrt(max(dim1 + dim2 - 2.0 * overlap_a * overlap_b, 0.0))


def _random_full_rank(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    while True:
        draw = rng.standard_normal((rows, cols))
        if np.linalg.matrix_rank(draw) == cols:
            return draw
        logger.debug("Rank-deficient random basis drawn, redrawing")


def benchmark_distance(
    p_left: int,
    p_right: int,
    d_left: int,
    d_right: int,
    reps: int,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """
    Expected distance between a fixed Kronecker subspace and a random one.

    The random factors have i.i.d. standard normal entries; the fixed ones
    are coordinate bases (the expectation does not depend on them).

    Args:
        p_left, p_right: Ambient factor dimensions
        d_left, d_right: Subspace factor dimensions
        reps: Monte-Carlo draws
        rng: Seeded generator

    Returns:
        (mean, standard error)
    """
    if not (1 <= d_left <= p_left and 1 <= d_right <= p_right):
        raise DimensionError(f"need 1 <= d <= p, got ({d_left}, {d_right}) in ({p_left}, {p_right})")
    if reps < 1:
        raise DimensionError("reps must be at least 1")

    alpha = np.eye(p_left)[:, :d_left]
    beta = np.eye(p_right)[:, :d_right]
    draws = np.empty(reps)
    for r in range(reps):
        alpha_star = _random_full_rank(rng, p_left, d_left)
        beta_star = _random_full_rank(rng, p_right, d_right)
        draws[r] = kron_projection_distance(alpha_star, beta_star, alpha, beta)

    mean = math.fsum(draws) / reps
    se = float(np.std(draws, ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    logger.info(f"📊 Benchmark distance ({p_left},{p_right},{d_left},{d_right}) = {mean:.3f} (SE {se:.4f})")
    return mean, se

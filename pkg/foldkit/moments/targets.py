"""
Inverse-regression moment targets for folded SIR, SAVE and DR.

All predictors are centered at the (possibly weighted) grand mean. The
stored targets are premultiplied by A = cov^{1/2}, i.e. they are the
standardized quantities:

- SIR:  cov^{-1/2} (slice mean)
- SAVE: cov^{-1/2} [Sigma - var(vec X | slice)] cov^{-1/2}
- DR:   cov^{-1/2} [2 Sigma - E(Delta Delta' | k, l)] cov^{-1/2}

where cov is the working covariance (Sigma, or Sigma + eps I in ridge mode).
"""

import logging
from typing import List, Literal, Optional, Tuple

import numpy as np

from foldkit.core.exceptions import DegenerateSlicingError, InputError, InsufficientSliceError
from foldkit.linalg.inversion import covariance_factors
from foldkit.linalg.schemas import InversionMode
from foldkit.moments.schemas import MomentTargets, RobustWeights, SampleSet, SliceAssignment
from foldkit.moments.slicing import slice_assign

logger = logging.getLogger(__name__)

Method = Literal["sir", "save", "dr"]


def _item_weights(samples: SampleSet, weights: Optional[RobustWeights]) -> np.ndarray:
    if weights is None:
        return np.full(samples.n, 1.0 / samples.n)
    if weights.w.shape[0] != samples.n:
        raise DegenerateSlicingError(f"{weights.w.shape[0]} weights for {samples.n} items")
    return weights.w


def _centered(samples: SampleSet, w: np.ndarray) -> np.ndarray:
    V = samples.vectors()
    return V - w @ V


def sample_cov(samples: SampleSet, weights: Optional[RobustWeights] = None) -> np.ndarray:
    """
    Covariance of vec(X) with the n (not n-1) denominator.

    With weights: sum_i w_i (v_i - v_w)(v_i - v_w)' around the weighted mean v_w.

    Example:
        X_1 = [[1]], X_2 = [[-1]] -> [[1.0]]
    """
    w = _item_weights(samples, weights)
    Vc = _centered(samples, w)
    cov = (Vc * w[:, None]).T @ Vc
    return (cov + cov.T) / 2.0


def _slice_moments(
    Vc: np.ndarray, w: np.ndarray, slices: SliceAssignment
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Weighted proportions, means and second moments (about the grand mean) per slice."""
    if slices.labels.shape[0] != Vc.shape[0]:
        raise DegenerateSlicingError("slice labels do not match the sample size")
    P = Vc.shape[1]
    props = np.zeros(slices.s)
    means = np.zeros((slices.s, P))
    seconds = np.zeros((slices.s, P, P))
    for ell in range(slices.s):
        idx = slices.members(ell)
        w_ell = w[idx]
        total = w_ell.sum()
        if total <= 0:
            raise DegenerateSlicingError(f"slice {ell} carries zero weight")
        block = Vc[idx]
        props[ell] = total
        means[ell] = w_ell @ block / total
        seconds[ell] = (block * w_ell[:, None]).T @ block / total
    return props / props.sum(), means, seconds


def _require_pairs(slices: SliceAssignment, method: str) -> None:
    counts = slices.counts
    if np.any(counts < 2):
        small = int(np.flatnonzero(counts < 2)[0])
        raise InsufficientSliceError(f"{method} needs at least 2 items per slice; slice {small} has {counts[small]}")


def _symmetric(M: np.ndarray) -> np.ndarray:
    return (M + np.swapaxes(M, -1, -2)) / 2.0


def sir_targets(
    samples: SampleSet,
    slices: SliceAssignment,
    mode: Optional[InversionMode] = None,
    weights: Optional[RobustWeights] = None,
) -> MomentTargets:
    """
    Standardized slice means, one (pR*pL x 1) target per slice.

    Raises:
        SingularityError: Singular covariance under exact inversion
    """
    mode = mode or InversionMode.exact()
    w = _item_weights(samples, weights)
    Vc = _centered(samples, w)
    sigma = sample_cov(samples, weights)
    working, root, inv_root, inv = covariance_factors(sigma, mode)

    props, means, _ = _slice_moments(Vc, w, slices)
    matrices = (means @ inv_root)[:, :, None]
    logger.debug(f"SIR targets: {slices.s} slices, P={samples.pl * samples.pr}")
    return MomentTargets(
        method="sir", pl=samples.pl, pr=samples.pr, matrices=matrices, weights=props,
        cov=working, cov_root=root, cov_inv_root=inv_root, cov_inv=inv, mode=mode,
    )


def save_targets(
    samples: SampleSet,
    slices: SliceAssignment,
    mode: Optional[InversionMode] = None,
    weights: Optional[RobustWeights] = None,
) -> MomentTargets:
    """
    Per-slice matrices cov^{-1/2}[Sigma - var_n(vec X | slice)]cov^{-1/2}.

    In exact mode this is I - var_n(Z | slice) with Z = Sigma^{-1/2} vec(X).
    Within-slice covariances use the slice-size denominator.

    Raises:
        InsufficientSliceError: A slice has fewer than 2 items
    """
    mode = mode or InversionMode.exact()
    _require_pairs(slices, "SAVE")
    w = _item_weights(samples, weights)
    Vc = _centered(samples, w)
    sigma = sample_cov(samples, weights)
    working, root, inv_root, inv = covariance_factors(sigma, mode)

    props, means, seconds = _slice_moments(Vc, w, slices)
    within = seconds - np.einsum("sp,sq->spq", means, means)
    matrices = _symmetric(inv_root @ (sigma[None] - within) @ inv_root)
    return MomentTargets(
        method="save", pl=samples.pl, pr=samples.pr, matrices=matrices, weights=props,
        cov=working, cov_root=root, cov_inv_root=inv_root, cov_inv=inv, mode=mode,
    )


def pair_second_moment(
    means: np.ndarray, seconds: np.ndarray, k: int, ell: int
) -> np.ndarray:
    """
    E_n(Delta Delta' | k, l) for Delta = v~ - v with v from slice k, v~ from slice l.

    Four terms: the two within-slice second moments minus both cross
    products of the slice means.
    """
    cross = np.outer(means[k], means[ell])
    return seconds[k] - cross - cross.T + seconds[ell]


def dr_targets(
    samples: SampleSet,
    slices: SliceAssignment,
    mode: Optional[InversionMode] = None,
    weights: Optional[RobustWeights] = None,
) -> MomentTargets:
    """
    Per ordered slice pair (k, l): cov^{-1/2}[2 Sigma - E_n(Delta Delta' | k, l)]cov^{-1/2}.

    Pair weights are p_k * p_l (n_k n_l / n^2 without robust weights).
    Targets are symmetric, and the (k, l) and (l, k) targets coincide.

    Raises:
        InsufficientSliceError: A slice has fewer than 2 items
    """
    mode = mode or InversionMode.exact()
    _require_pairs(slices, "DR")
    w = _item_weights(samples, weights)
    Vc = _centered(samples, w)
    sigma = sample_cov(samples, weights)
    working, root, inv_root, inv = covariance_factors(sigma, mode)

    props, means, seconds = _slice_moments(Vc, w, slices)
    pairs: List[Tuple[int, int]] = [(k, ell) for k in range(slices.s) for ell in range(slices.s)]
    P = sigma.shape[0]
    matrices = np.empty((len(pairs), P, P))
    pair_weights = np.empty(len(pairs))
    for j, (k, ell) in enumerate(pairs):
        delta_moment = pair_second_moment(means, seconds, k, ell)
        matrices[j] = inv_root @ (2.0 * sigma - delta_moment) @ inv_root
        pair_weights[j] = props[k] * props[ell]

    return MomentTargets(
        method="dr", pl=samples.pl, pr=samples.pr, matrices=_symmetric(matrices),
        weights=pair_weights / pair_weights.sum(), cov=working, cov_root=root,
        cov_inv_root=inv_root, cov_inv=inv, mode=mode, pairs=pairs,
    )


_BUILDERS = {"sir": sir_targets, "save": save_targets, "dr": dr_targets}


def build_targets(
    samples: SampleSet,
    method: Method,
    s: Optional[int],
    mode: Optional[InversionMode] = None,
    weights: Optional[RobustWeights] = None,
) -> MomentTargets:
    """Slice the sample and build the targets of one method."""
    if method not in _BUILDERS:
        raise InputError(f"unknown method '{method}', expected one of {sorted(_BUILDERS)}")
    slices = slice_assign(samples, s, weights)
    return _BUILDERS[method](samples, slices, mode, weights)

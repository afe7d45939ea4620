"""
Response slicing: partition the items by their response values.
"""

import logging
from typing import Optional

import numpy as np

from foldkit.core.exceptions import DegenerateSlicingError
from foldkit.moments.schemas import RobustWeights, SampleSet, SliceAssignment

logger = logging.getLogger(__name__)


def _proportions(labels: np.ndarray, s: int, weights: Optional[RobustWeights]) -> np.ndarray:
    if weights is None:
        return np.bincount(labels, minlength=s) / labels.size
    props = np.bincount(labels, weights=weights.w, minlength=s)
    return props / props.sum()


def slice_assign(
    samples: SampleSet,
    s: Optional[int] = None,
    weights: Optional[RobustWeights] = None,
) -> SliceAssignment:
    """
    Assign every item to a slice of the response range.

    Categorical responses get one slice per distinct label (sorted by label
    value). Continuous responses are split into s equal-count slices by their
    order statistics; ties are broken by sample order.

    Args:
        samples: The sample
        s: Number of slices (required for continuous responses)
        weights: Optional robust weights; slice proportions become weighted sums

    Returns:
        SliceAssignment with 0-based labels

    Raises:
        DegenerateSlicingError: Fewer than 2 slices possible, or more slices
            than distinct response values

    Example:
        y = (1, 2, 3, 4, 5, 6), s = 3 -> slices {1, 2}, {3, 4}, {5, 6}
    """
    y = samples.y
    values = np.unique(y)

    if samples.response_kind == "categorical":
        if values.size < 2:
            raise DegenerateSlicingError("categorical response has a single label")
        if s is not None and s != values.size:
            logger.warning(f"⚠️ Categorical response has {values.size} labels; using {values.size} slices instead of {s}")
        labels = np.searchsorted(values, y)
        return SliceAssignment(
            s=values.size,
            labels=labels,
            proportions=_proportions(labels, values.size, weights),
            slice_values=[float(v) for v in values],
        )

    if s is None or s < 2:
        raise DegenerateSlicingError(f"continuous slicing needs s >= 2, got {s}")
    if samples.n < s:
        raise DegenerateSlicingError(f"cannot cut {samples.n} items into {s} slices")
    if values.size < s:
        raise DegenerateSlicingError(f"response has {values.size} distinct values, fewer than {s} slices")

    order = np.argsort(y, kind="stable")
    labels = np.empty(samples.n, dtype=int)
    for slice_index, members in enumerate(np.array_split(order, s)):
        labels[members] = slice_index

    logger.debug(f"Sliced {samples.n} items into {s} slices: {np.bincount(labels).tolist()}")
    return SliceAssignment(s=s, labels=labels, proportions=_proportions(labels, s, weights))

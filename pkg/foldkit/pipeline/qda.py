"""
Gaussian quadratic discriminant analysis.

Discriminant of class c at x:

    log prior_c - 1/2 log det Sigma_c - 1/2 (x - mu_c)' Sigma_c^-1 (x - mu_c)

The predicted label is the argmax; ties go to the smallest label.
"""

import logging
from typing import Optional

import numpy as np
from scipy import linalg

from foldkit.config import settings
from foldkit.core.exceptions import DimensionError, InsufficientSliceError, SingularityError
from foldkit.linalg.schemas import InversionMode
from foldkit.pipeline.schemas import ClassModel, QdaModel

logger = logging.getLogger(__name__)


def _precision_and_log_det(cov: np.ndarray, mode: InversionMode, label: float):
    eigvals, eigvecs = linalg.eigh(cov)
    eigvals = np.clip(eigvals, 0.0, None)
    lam_max = eigvals[-1]

    if mode.kind == "ridge":
        kept = eigvals + mode.shift
        inverse = 1.0 / kept
    elif mode.kind == "pinv":
        keep = eigvals > mode.rank_tol * lam_max if lam_max > 0 else np.zeros_like(eigvals, dtype=bool)
        if not keep.any():
            raise SingularityError(f"class {label:g} covariance is zero", remedy="--inversion ridge --epsilon E")
        kept = eigvals[keep]
        inverse = np.zeros_like(eigvals)
        inverse[keep] = 1.0 / kept
    else:
        if lam_max <= 0 or eigvals[0] < settings.singular_tol * lam_max:
            raise SingularityError(
                f"class {label:g} covariance is singular under exact inversion",
                remedy="--inversion ridge --epsilon E",
            )
        kept = eigvals
        inverse = 1.0 / eigvals

    precision = (eigvecs * inverse) @ eigvecs.T
    return (precision + precision.T) / 2.0, float(np.sum(np.log(kept)))


def qda_fit(features: np.ndarray, labels: np.ndarray, mode: Optional[InversionMode] = None) -> QdaModel:
    """
    Fit one Gaussian per class.

    Class covariances use the unbiased (n_c - 1) denominator. In ridge mode
    eps I is added; in pinv mode the pseudo-inverse and pseudo-determinant
    are used.

    Args:
        features: (n, d) feature rows
        labels: (n,) class labels
        mode: Inversion mode for the class covariances

    Returns:
        QdaModel with classes sorted by label

    Raises:
        InsufficientSliceError: Fewer than 2 classes, or a class with one member
        SingularityError: Singular class covariance in exact mode
    """
    mode = mode or InversionMode.exact()
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, None]
    labels = np.asarray(labels, dtype=float).reshape(-1)
    if features.shape[0] != labels.shape[0]:
        raise DimensionError(f"{features.shape[0]} feature rows but {labels.shape[0]} labels")

    values = np.unique(labels)
    if values.size < 2:
        raise InsufficientSliceError("QDA needs at least 2 classes")

    classes = []
    for value in values:
        members = features[labels == value]
        if members.shape[0] < 2:
            raise InsufficientSliceError(f"class {value:g} has a single member")
        cov = np.atleast_2d(np.cov(members, rowvar=False, ddof=1))
        precision, log_det = _precision_and_log_det(cov, mode, value)
        classes.append(
            ClassModel(
                label=float(value),
                prior=members.shape[0] / features.shape[0],
                mean=members.mean(axis=0),
                covariance=cov,
                precision=precision,
                log_det=log_det,
            )
        )

    logger.debug(f"QDA fitted on {features.shape[0]} rows, {len(classes)} classes, mode {mode.describe()}")
    return QdaModel(classes=classes, mode=mode)


def qda_scores(model: QdaModel, X: np.ndarray) -> np.ndarray:
    """(n, classes) discriminant scores."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    scores = np.empty((X.shape[0], len(model.classes)))
    for c, cls in enumerate(model.classes):
        centered = X - cls.mean
        quad = np.einsum("ip,pq,iq->i", centered, cls.precision, centered)
        scores[:, c] = np.log(cls.prior) - 0.5 * cls.log_det - 0.5 * quad
    return scores


def qda_predict(model: QdaModel, X: np.ndarray) -> np.ndarray:
    """Predicted labels for one feature vector or an (n, d) stack."""
    scores = qda_scores(model, X)
    labels = np.asarray(model.labels)
    return labels[np.argmax(scores, axis=1)]

"""
Pydantic schemas for samples, slicings and inverse-regression targets.

Arrays stored on these models are read-only copies.
"""

from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from foldkit.config import settings
from foldkit.core.exceptions import DimensionError
from foldkit.core.utils import frozen_array
from foldkit.linalg.inversion import covariance_factors
from foldkit.linalg.schemas import InversionMode
from foldkit.linalg.tensor_ops import vec_batch

ResponseKind = Literal["continuous", "categorical"]


class SampleSet(BaseModel):
    """
    n matrix observations X_i (pL x pR) with responses y_i.

    Example:
        SampleSet(X=np.zeros((10, 3, 4)), y=np.arange(10.0), response_kind="continuous")
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    X: np.ndarray  # (n, pL, pR)
    y: np.ndarray  # (n,)
    response_kind: ResponseKind = "continuous"
    ids: Optional[List[str]] = None  # stable item identifiers, default "0".."n-1"

    @field_validator("X", mode="before")
    @classmethod
    def _check_X(cls, value) -> np.ndarray:
        return frozen_array(value, "X", ndim=3)

    @field_validator("y", mode="before")
    @classmethod
    def _check_y(cls, value) -> np.ndarray:
        return frozen_array(np.asarray(value, dtype=float).reshape(-1), "y", ndim=1)

    @model_validator(mode="after")
    def _check_sizes(self) -> "SampleSet":
        n = self.X.shape[0]
        if self.y.shape[0] != n:
            raise DimensionError(f"{n} matrices but {self.y.shape[0]} responses")
        if n < 2:
            raise DimensionError("a sample needs at least 2 items")
        if self.ids is None:
            object.__setattr__(self, "ids", [str(i) for i in range(n)])
        elif len(self.ids) != n or len(set(self.ids)) != n:
            raise DimensionError("ids must be unique, one per item")
        return self

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def pl(self) -> int:
        return self.X.shape[1]

    @property
    def pr(self) -> int:
        return self.X.shape[2]

    def vectors(self) -> np.ndarray:
        """(n, pL*pR) matrix whose rows are vec(X_i)."""
        return vec_batch(self.X)

    def subset(self, indices) -> "SampleSet":
        idx = np.asarray(indices, dtype=int)
        return SampleSet(
            X=self.X[idx],
            y=self.y[idx],
            response_kind=self.response_kind,
            ids=[self.ids[i] for i in idx],
        )

    def with_matrices(self, X: np.ndarray) -> "SampleSet":
        """Same responses and ids, new predictors (e.g. after screening)."""
        return SampleSet(X=X, y=self.y, response_kind=self.response_kind, ids=list(self.ids))


class SliceAssignment(BaseModel):
    """Partition of the items into s slices (0-based labels)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    s: int = Field(..., ge=1)
    labels: np.ndarray  # (n,) ints in 0..s-1
    proportions: np.ndarray  # (s,) slice weights, sum 1
    slice_values: Optional[List[float]] = None  # categorical label per slice

    @field_validator("labels", mode="before")
    @classmethod
    def _check_labels(cls, value) -> np.ndarray:
        labels = np.array(value, dtype=int, copy=True).reshape(-1)
        labels.flags.writeable = False
        return labels

    @field_validator("proportions", mode="before")
    @classmethod
    def _check_proportions(cls, value) -> np.ndarray:
        return frozen_array(np.asarray(value, dtype=float).reshape(-1), "proportions", ndim=1)

    @model_validator(mode="after")
    def _check_partition(self) -> "SliceAssignment":
        if self.labels.min() < 0 or self.labels.max() >= self.s:
            raise DimensionError(f"slice labels must lie in 0..{self.s - 1}")
        counts = np.bincount(self.labels, minlength=self.s)
        if np.any(counts == 0):
            raise DimensionError("every slice must be nonempty")
        if self.proportions.shape[0] != self.s:
            raise DimensionError("one proportion per slice required")
        if np.any(self.proportions < 0) or abs(self.proportions.sum() - 1.0) > 1e-12:
            raise DimensionError("slice proportions must be nonnegative and sum to 1")
        return self

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.s)

    def members(self, slice_index: int) -> np.ndarray:
        return np.flatnonzero(self.labels == slice_index)


class RobustWeights(BaseModel):
    """Per-item weights for the robust moment estimators."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    w: np.ndarray
    cutoff_quantile: float = Field(..., gt=0, le=1)
    cutoff: float = Field(..., ge=0, description="Mahalanobis cutoff c")
    scheme: str = "huber"  # w_i proportional to min(1, c / d_i)

    @field_validator("w", mode="before")
    @classmethod
    def _normalized(cls, value) -> np.ndarray:
        w = np.asarray(value, dtype=float).reshape(-1)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be nonnegative with a positive sum")
        return frozen_array(w / w.sum(), "weights", ndim=1)


class MomentTargets(BaseModel):
    """
    Weighted inverse-regression targets, premultiplied by A = cov^{1/2}.

    `matrices[j]` is the (pR*pL x k) target of slice (or slice pair) j:
    k = 1 for SIR, k = pR*pL for SAVE and DR. The objective fitted by the
    envelope solver is sum_j weights[j] * ||matrices[j] - A (b kron a) f_j||^2.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    method: Literal["sir", "save", "dr", "custom"]
    pl: int = Field(..., ge=1)
    pr: int = Field(..., ge=1)
    matrices: np.ndarray  # (J, P, k)
    weights: np.ndarray  # (J,)
    cov: np.ndarray  # working covariance (P, P)
    cov_root: np.ndarray
    cov_inv_root: np.ndarray
    cov_inv: np.ndarray
    mode: InversionMode = Field(default_factory=InversionMode.exact)
    pairs: Optional[List[Tuple[int, int]]] = None  # DR slice pair of each target

    @field_validator("matrices", mode="before")
    @classmethod
    def _check_matrices(cls, value) -> np.ndarray:
        return frozen_array(value, "target matrices", ndim=3)

    @field_validator("weights", mode="before")
    @classmethod
    def _check_weights(cls, value) -> np.ndarray:
        return frozen_array(np.asarray(value, dtype=float).reshape(-1), "target weights", ndim=1)

    @field_validator("cov", "cov_root", "cov_inv_root", "cov_inv", mode="before")
    @classmethod
    def _check_square(cls, value) -> np.ndarray:
        return frozen_array(value, "covariance factor", ndim=2)

    @model_validator(mode="after")
    def _check_consistency(self) -> "MomentTargets":
        P = self.pl * self.pr
        J = self.matrices.shape[0]
        if self.matrices.shape[1] != P:
            raise DimensionError(f"targets have {self.matrices.shape[1]} rows, expected pL*pR = {P}")
        for name in ("cov", "cov_root", "cov_inv_root", "cov_inv"):
            if getattr(self, name).shape != (P, P):
                raise DimensionError(f"{name} must be {P} x {P}")
        if self.weights.shape[0] != J:
            raise DimensionError(f"{J} targets but {self.weights.shape[0]} weights")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-10:
            raise DimensionError("target weights must be nonnegative and sum to 1")
        if self.method in ("save", "dr"):
            scale = max(np.abs(self.matrices).max(), 1.0)
            if np.abs(self.matrices - np.swapaxes(self.matrices, 1, 2)).max() > settings.symmetry_tol * scale:
                raise DimensionError(f"{self.method} target matrices must be symmetric")
        return self

    @property
    def P(self) -> int:
        return self.pl * self.pr

    @property
    def k(self) -> int:
        return self.matrices.shape[2]

    @property
    def count(self) -> int:
        return self.matrices.shape[0]

    @classmethod
    def from_components(
        cls,
        matrices: np.ndarray,
        weights: np.ndarray,
        pl: int,
        pr: int,
        cov: Optional[np.ndarray] = None,
        mode: Optional[InversionMode] = None,
        method: str = "custom",
        pairs: Optional[List[Tuple[int, int]]] = None,
    ) -> "MomentTargets":
        """
        Build targets from premultiplied matrices and a raw covariance.

        The working covariance and its roots are derived here under `mode`;
        cov defaults to the identity.
        """
        mode = mode or InversionMode.exact()
        P = pl * pr
        cov = np.eye(P) if cov is None else np.asarray(cov, dtype=float)
        mats = np.asarray(matrices, dtype=float)
        if mats.ndim == 2:
            mats = mats[:, :, None]
        working, root, inv_root, inv = covariance_factors(cov, mode)
        return cls(
            method=method,
            pl=pl,
            pr=pr,
            matrices=mats,
            weights=weights,
            cov=working,
            cov_root=root,
            cov_inv_root=inv_root,
            cov_inv=inv,
            mode=mode,
            pairs=pairs,
        )

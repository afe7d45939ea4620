"""
Pydantic schemas shared by the linear-algebra kernels.
"""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from foldkit.config import settings
from foldkit.core.utils import frozen_array


class InversionMode(BaseModel):
    """
    How a symmetric PSD matrix is inverted.

    - exact: plain inverse, refuses numerically singular input
    - pinv: Moore-Penrose, eigenvalues below rank_tol * lambda_max dropped
    - ridge: (S + epsilon I)^-1

    Example:
        InversionMode(kind="ridge", epsilon=0.5)
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["exact", "pinv", "ridge"] = "exact"
    epsilon: Optional[float] = Field(None, gt=0, description="Ridge shift, ridge mode only")
    rank_tol: float = Field(default_factory=lambda: settings.rank_tol, gt=0)

    @model_validator(mode="after")
    def _ridge_needs_epsilon(self) -> "InversionMode":
        if self.kind == "ridge" and self.epsilon is None:
            raise ValueError("ridge inversion requires epsilon > 0")
        return self

    @classmethod
    def exact(cls) -> "InversionMode":
        return cls(kind="exact")

    @classmethod
    def pseudo(cls, rank_tol: Optional[float] = None) -> "InversionMode":
        return cls(kind="pinv", rank_tol=rank_tol if rank_tol is not None else settings.rank_tol)

    @classmethod
    def ridge(cls, epsilon: float) -> "InversionMode":
        return cls(kind="ridge", epsilon=epsilon)

    @property
    def shift(self) -> float:
        """Amount added to every eigenvalue (nonzero only for ridge)."""
        return float(self.epsilon) if self.kind == "ridge" else 0.0

    def describe(self) -> str:
        if self.kind == "ridge":
            return f"ridge(epsilon={self.epsilon})"
        if self.kind == "pinv":
            return f"pinv(rank_tol={self.rank_tol})"
        return "exact"


class SubspaceBasis(BaseModel):
    """A full-column-rank matrix whose columns span a subspace."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def _full_column_rank(cls, value) -> np.ndarray:
        arr = frozen_array(value, "basis", ndim=2)
        if arr.shape[1] > arr.shape[0]:
            raise ValueError(f"basis has more columns than rows: {arr.shape}")
        singular_values = np.linalg.svd(arr, compute_uv=False)
        if singular_values[-1] <= settings.rank_tol * max(singular_values[0], 1.0):
            raise ValueError("basis columns are linearly dependent")
        return arr

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def subspace_dim(self) -> int:
        return self.matrix.shape[1]

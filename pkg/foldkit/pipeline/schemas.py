"""
Pydantic schemas for screening, discriminant models and LOOCV results.
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from foldkit.core.utils import frozen_array
from foldkit.linalg.schemas import InversionMode


class ScreenBases(BaseModel):
    """Leading eigenvectors of the left and right pooled scatter matrices."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    left: np.ndarray  # pL x sL
    right: np.ndarray  # pR x sR
    left_eigenvalues: np.ndarray
    right_eigenvalues: np.ndarray

    @field_validator("left", "right", mode="before")
    @classmethod
    def _check_basis(cls, value) -> np.ndarray:
        return frozen_array(value, "screen basis", ndim=2)

    @field_validator("left_eigenvalues", "right_eigenvalues", mode="before")
    @classmethod
    def _check_eigenvalues(cls, value) -> np.ndarray:
        return frozen_array(np.asarray(value, dtype=float).reshape(-1), "eigenvalues", ndim=1)


class ClassModel(BaseModel):
    """Gaussian parameters of one class."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    label: float
    prior: float = Field(..., gt=0, le=1)
    mean: np.ndarray
    covariance: np.ndarray
    precision: np.ndarray  # covariance inverse under the model's inversion mode
    log_det: float

    @field_validator("mean", "covariance", "precision", mode="before")
    @classmethod
    def _check_array(cls, value) -> np.ndarray:
        return frozen_array(value, "class parameter")


class QdaModel(BaseModel):
    """Quadratic discriminant model; classes sorted by label."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    classes: List[ClassModel]
    mode: InversionMode

    @property
    def labels(self) -> List[float]:
        return [c.label for c in self.classes]


class LoocvResult(BaseModel):
    """Held-out predictions in the original item order."""
    model_config = ConfigDict(frozen=True)

    method: str
    ids: List[str]
    truth: List[float]
    predictions: List[float]
    correct_count: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct_count / self.total

    def summary(self) -> str:
        return f"{self.correct_count}/{self.total}"

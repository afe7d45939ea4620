"""
Pydantic schemas for the Kronecker envelope solver.
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from foldkit.config import settings
from foldkit.core.utils import frozen_array
from foldkit.linalg.schemas import InversionMode


class FoldingConfig(BaseModel):
    """
    Envelope dimensions and the alternating least squares policy.

    Example:
        FoldingConfig(ml=2, mr=2, restarts=5, seed=42)
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    ml: int = Field(..., ge=1, description="Left envelope dimension mL")
    mr: int = Field(..., ge=1, description="Right envelope dimension mR")
    max_iters: int = Field(default_factory=lambda: settings.max_iters, ge=1)
    rel_tol: float = Field(default_factory=lambda: settings.rel_tol, gt=0)
    abs_tol: float = Field(default_factory=lambda: settings.abs_tol, ge=0)
    restarts: int = Field(default_factory=lambda: settings.restarts, ge=1)
    inversion: InversionMode = Field(default_factory=InversionMode.exact)
    seed: int = 0
    normalize_bases: bool = True


class FoldingFit(BaseModel):
    """
    Estimated bases a (pL x mL), b (pR x mR) and coefficients f.

    f has shape (J, mR*mL, k): one coefficient matrix per target of the
    MomentTargets that were folded. Only span(b kron a) is identified.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a: np.ndarray
    b: np.ndarray
    f: np.ndarray
    objective: float
    objective_trace: List[float]
    converged: bool
    iterations: int
    restart_index: int
    restart_objectives: List[float]
    method: str = "custom"

    @field_validator("a", "b", mode="before")
    @classmethod
    def _check_basis(cls, value) -> np.ndarray:
        return frozen_array(value, "basis", ndim=2)

    @field_validator("f", mode="before")
    @classmethod
    def _check_coefficients(cls, value) -> np.ndarray:
        return frozen_array(value, "coefficients", ndim=3)

    @property
    def kron_basis(self) -> np.ndarray:
        """b kron a, a basis of the estimated folding subspace."""
        return np.kron(self.b, self.a)

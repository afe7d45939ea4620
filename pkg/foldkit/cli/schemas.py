"""
Pydantic schemas for run-configuration files.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from foldkit.config import settings
from foldkit.envelope.schemas import FoldingConfig
from foldkit.linalg.schemas import InversionMode


class RunConfigFile(BaseModel):
    """
    JSON run configuration for `fit` and `classify`.

    Unknown keys are rejected. Command-line flags override the file.

    Example:
        {"method": "dr", "slices": 2, "ml": 2, "mr": 2, "inversion": "ridge", "epsilon": 0.5}
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    method: Literal["sir", "save", "dr", "csir", "csave", "cdr"]
    slices: Optional[int] = Field(..., ge=1, description="Slice count; null for one slice per class")
    ml: int = Field(..., ge=1)
    mr: int = Field(..., ge=1)

    screen_l: Optional[int] = Field(None, ge=1)
    screen_r: Optional[int] = Field(None, ge=1)
    inversion: Literal["exact", "pinv", "ridge"] = "exact"
    epsilon: Optional[float] = Field(None, gt=0)
    restarts: int = Field(default_factory=lambda: settings.restarts, ge=1)
    tol: float = Field(default_factory=lambda: settings.rel_tol, gt=0)
    max_iters: int = Field(default_factory=lambda: settings.max_iters, ge=1)
    seed: int = 0
    conventional_dim: Optional[int] = Field(None, ge=1)
    robust_cutoff: Optional[float] = Field(None, gt=0, le=1)

    @model_validator(mode="after")
    def _check_ridge(self) -> "RunConfigFile":
        if self.inversion == "ridge" and self.epsilon is None:
            raise ValueError("inversion 'ridge' requires epsilon")
        return self

    @property
    def conventional(self) -> bool:
        return self.method.startswith("c")

    def inversion_mode(self) -> InversionMode:
        if self.inversion == "ridge":
            return InversionMode.ridge(self.epsilon)
        if self.inversion == "pinv":
            return InversionMode.pseudo()
        return InversionMode.exact()

    def folding_config(self) -> FoldingConfig:
        return FoldingConfig(
            ml=self.ml,
            mr=self.mr,
            max_iters=self.max_iters,
            rel_tol=self.tol,
            restarts=self.restarts,
            inversion=self.inversion_mode(),
            seed=self.seed,
        )

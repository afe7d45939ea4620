"""
Pydantic schemas for the simulation models and Monte-Carlo reports.
"""

import math
from typing import Dict, List, Literal, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from foldkit.config import settings

Variant = Literal["example1", "example2"]

# 0-based (row, column) cells whose variance differs between the classes
VARIANCE_CELLS: Dict[str, Tuple[Tuple[int, int], ...]] = {
    "example1": ((0, 1), (1, 0)),
    "example2": ((0, 0), (0, 1), (1, 0)),
}

# dimension of the unfolded central subspace of vec(X)
CONVENTIONAL_DIMS: Dict[str, int] = {"example1": 3, "example2": 4}


class MixtureModelSpec(BaseModel):
    """
    Two-component matrix-normal mixture.

    Y ~ Bernoulli(pi). Given Y the entries of X are independent normals;
    E(X | Y=1) has mu on the (0, 0) and (1, 1) cells and zero elsewhere,
    E(X | Y=0) = 0. Cells in the variant's variance set have variance
    sigma2 (Y=0) or tau2 (Y=1); every other cell has variance 1.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    variant: Variant = "example1"
    p: int = Field(..., ge=2, description="pL = pR = p")
    pi: float = Field(0.5, gt=0, lt=1)
    mu: float = Field(default_factory=lambda: settings.mixture_mu)
    sigma2: float = Field(0.1, gt=0)
    tau2: float = Field(1.5, gt=0)

    @model_validator(mode="after")
    def _check_separation(self) -> "MixtureModelSpec":
        if self.mu == 0:
            raise ValueError("mu must be nonzero")
        if self.sigma2 == self.tau2:
            raise ValueError("sigma2 and tau2 must differ")
        return self

    @property
    def variance_cells(self) -> Tuple[Tuple[int, int], ...]:
        return VARIANCE_CELLS[self.variant]

    @property
    def conventional_dim(self) -> int:
        return CONVENTIONAL_DIMS[self.variant]


class BenchCell(BaseModel):
    """Mean distance of one method at one (n, p)."""
    model_config = ConfigDict(frozen=True)

    method: str
    n: int
    p: int
    mean: float
    se: float
    replications: int
    failures: int = 0
    flagged: bool = False  # more than 1% of replications failed


class BenchReport(BaseModel):
    """All cells of one simulation table plus the benchmark distance per p."""
    model_config = ConfigDict(frozen=True)

    table: int
    methods: List[str]
    n_list: List[int]
    p_list: List[int]
    replications: int
    seed: int
    cells: List[BenchCell]
    benchmark: Dict[int, Tuple[float, float]]  # p -> (mean, se)
    runtime_seconds: Optional[float] = None

    def cell(self, method: str, n: int, p: int) -> BenchCell:
        for c in self.cells:
            if c.method == method and c.n == n and c.p == p:
                return c
        raise KeyError(f"no cell for ({method}, n={n}, p={p})")

    def to_frame(self, value: str = "mean") -> pd.DataFrame:
        """
        Wide table: one row per (p, method), one column per n.

        Args:
            value: "mean" or "se"
        """
        records = [{"p": c.p, "method": c.method, "n": c.n, value: getattr(c, value)} for c in self.cells]
        frame = pd.DataFrame.from_records(records)
        wide = frame.pivot(index=["p", "method"], columns="n", values=value)
        order = pd.MultiIndex.from_product([self.p_list, self.methods], names=["p", "method"])
        wide = wide.reindex(index=order, columns=self.n_list)
        wide.columns = [f"n={n}" for n in wide.columns]
        return wide.reset_index()

    def to_csv(self) -> str:
        return self.to_frame("mean").to_csv(index=False, float_format="%.17g", lineterminator="\n")

    def summary(self) -> dict:
        """
        JSON sidecar content: standard errors, failures, seed and replication count.

        Wall-clock runtime is logged, not stored, so reruns stay byte-identical.
        """
        return {
            "table": self.table,
            "replications": self.replications,
            "seed": self.seed,
            "benchmark": {str(p): {"mean": m, "se": se} for p, (m, se) in sorted(self.benchmark.items())},
            "cells": [
                {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in c.model_dump().items()}
                for c in self.cells
            ],
        }

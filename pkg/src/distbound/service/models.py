"""Pydantic request/response models shared by the HTTP service and the CLI."""
from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

METHODS = ("exact", "logconv", "softmin", "blend", "heat", "taylor1", "taylor2")
DIFFERENTIAL = ("heat", "taylor1", "taylor2")
CONVOLUTIONAL = ("logconv", "softmin", "blend")


class ManifestBase(BaseModel):
    """Common run manifest: input shape, estimator parameters, output sink."""

    model_config = ConfigDict(populate_by_name=True)

    input: str | None = None
    shape: str | None = None
    K: float = 0.1
    d: int = 1
    normalize: bool | None = None  # None: on for differential methods, off otherwise
    prefactor: bool = True
    out_dir: str
    seed: int = 0
    rel_tol: float = 1e-10

    @model_validator(mode="after")
    def _one_input(self):
        if (self.input is None) == (self.shape is None):
            raise ValueError("exactly one of 'input' (PGM path) or 'shape' (builtin spec) is required")
        return self

    @field_validator("d")
    @classmethod
    def _d_range(cls, v):
        if v not in (1, 2):
            raise ValueError("d must be 1 or 2")
        return v


class ComputeRequest(ManifestBase):
    method: str
    t: float | None = None
    lam: float | None = Field(default=None, alias="lambda")

    @model_validator(mode="after")
    def _check(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.method != "exact":
            if (self.t is None) == (self.lam is None):
                raise ValueError("exactly one of 't' or 'lambda' is required")
            val = self.t if self.t is not None else self.lam
            if not val > 0:
                raise ValueError("t / lambda must be positive")
        return self

    def lam_value(self) -> float:
        if self.method == "exact":
            return float("nan")
        return self.lam if self.lam is not None else 1.0 / math.sqrt(self.t)


class SweepRequest(ManifestBase):
    methods: list[str]
    t_min: float = 0.2
    t_max: float = 10.0
    t_steps: int = 25
    log_grid: bool = True

    @model_validator(mode="after")
    def _check(self):
        if not self.methods:
            raise ValueError("method list must be non-empty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {METHODS}")
        if not 0 < self.t_min <= self.t_max:
            raise ValueError("need 0 < t_min <= t_max")
        if self.t_steps < 1:
            raise ValueError("t_steps must be at least 1")
        return self


class CompareConvRequest(ManifestBase):
    lam: float | None = Field(default=None, alias="lambda")
    t: float | None = None
    row: int = -1  # -1: centre row of the inside set

    @model_validator(mode="after")
    def _check(self):
        if (self.t is None) == (self.lam is None):
            raise ValueError("exactly one of 't' or 'lambda' is required")
        val = self.t if self.t is not None else self.lam
        if not val > 0:
            raise ValueError("t / lambda must be positive")
        return self

    def lam_value(self) -> float:
        return self.lam if self.lam is not None else 1.0 / math.sqrt(self.t)


class SliceRequest(BaseModel):
    field: str
    row: int


class ReportRow(BaseModel):
    method: str
    normalized: bool = False
    t: float | None = None
    l2: float | None = None
    linf: float | None = None
    n_nodes: int = 0
    flags: list[str] = []


class ComputeResponse(BaseModel):
    row: ReportRow
    files: dict[str, str]


class SweepResponse(BaseModel):
    rows: list[ReportRow]
    files: dict[str, str]


class CompareConvResponse(BaseModel):
    l2: dict[str, float]
    files: dict[str, str]


class SliceResponse(BaseModel):
    row: int
    columns: list[int]
    values: list[float]

"""Pydantic request/response models for the HTTP surface."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class KeygenRequest(BaseModel):
    kappa: int = 512
    c: int = 6
    seed: int = 0
    out_path: Optional[str] = None


class KeygenResponse(BaseModel):
    modulus_bits: int
    kappa: int
    c: int
    r1_bits: int
    path: Optional[str] = None


class SynthRequest(BaseModel):
    rows: int = 200
    features: int = 6
    task: str = "classification"
    seed: int = 7
    informative: list[int] = Field(default_factory=lambda: [0])
    noise: float = 0.0
    classes: int = 2
    out_path: str


class SynthResponse(BaseModel):
    path: str
    rows: int
    features: int


class TrainRequest(BaseModel):
    config: dict[str, Any]
    run_id: Optional[str] = None
    store_dir: str
    seed: Optional[int] = None


class TrainResponse(BaseModel):
    run_id: str
    trees: int
    internal_nodes: int
    providers: list[int]
    forest_path: str
    ledger_path: str


class PredictRequest(BaseModel):
    run_id: str
    store_dir: str
    features: list[float]
    requester: Optional[int] = None


class PredictResponse(BaseModel):
    run_id: str
    prediction: float
    path_bits: int


class TestRequest(BaseModel):
    run_id: str
    store_dir: str
    rows: Optional[list[int]] = None
    max_rows: int = 50
    standard_r2: bool = False
    out_path: Optional[str] = None


class TestResponse(BaseModel):
    run_id: str
    n_rows: int
    metrics: dict[str, float]
    metrics_path: Optional[str] = None


class RevokeRequest(BaseModel):
    run_id: str
    store_dir: str
    participant: int
    level: int = 1


class RevokeResponse(BaseModel):
    run_id: str
    accepted: bool
    participant: int
    level: int
    remaining_providers: list[int]


class BenchRequest(BaseModel):
    config: dict[str, Any]
    out_dir: str


class BenchResponse(BaseModel):
    reports: list[str]


class ErrorBody(BaseModel):
    error: str
    kind: str

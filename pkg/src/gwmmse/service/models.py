"""Pydantic request/response schemas for the HTTP service."""

from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class CodeResponse(BaseModel):
    sv: int
    octal: int
    chips: Optional[list[int]] = None


class CodeListResponse(BaseModel):
    codes: list[CodeResponse]


class DelayTableRequest(BaseModel):
    sv: int = 1
    count: int = 3


class DelayEntryModel(BaseModel):
    delay: int
    corr: int


class DelayTableResponse(BaseModel):
    sv: int
    entries: list[DelayEntryModel]


class SimulateRequest(BaseModel):
    """Sweep parameters; unset fields take the harness defaults."""

    seed: Optional[int] = None
    sv: Optional[int] = None
    g: Optional[int] = None
    window_l: Optional[int] = None
    detectors: Optional[list[str]] = None
    isr_db: Optional[list[float]] = None
    n_bits: Optional[int] = None
    n_interferers: Optional[int] = None
    interferer_delays: Optional[Union[str, list[int]]] = None
    bit_epoch_offsets: Optional[list[int]] = None
    noise_var: Optional[float] = None
    solve_stride: Optional[int] = None


class BerPointModel(BaseModel):
    isr_db: float
    detector: str
    g: int
    window_l: int
    n_interferers: int
    bits_counted: int
    errors: int
    ber: float
    ci_low: float
    ci_high: float
    seed: int


class SimulateResponse(BaseModel):
    points: list[BerPointModel]
    interferer_delays: list[int]


class JobCreatedResponse(BaseModel):
    job_id: str


class JobStatusResponse(BaseModel):
    job_id: str
    status: str = Field(description="queued | running | done | error")
    detail: Optional[str] = None
    points: Optional[list[BerPointModel]] = None
    interferer_delays: Optional[list[int]] = None


class GainRequest(BaseModel):
    points_a: list[BerPointModel]
    points_b: list[BerPointModel]
    target_ber: float = 1e-3


class CrossingModel(BaseModel):
    curve: str
    status: str
    isr_at_target: Optional[float] = None


class GainResponse(BaseModel):
    target_ber: float
    curve_a: CrossingModel
    curve_b: CrossingModel
    gain_db: Optional[float] = None
    reached: bool


class BenchRequest(BaseModel):
    seconds: float = 2.0
    detector: str = "mmse"
    g: Optional[int] = None
    window_l: Optional[int] = None
    noise_var: Optional[float] = None
    n_interferers: Optional[int] = None


class BenchResponse(BaseModel):
    detector: str
    epochs_per_second: float
    channels_realtime: int

"""FastAPI application wrapping the simulation core.

The CLI talks to these endpoints (in-process by default); long sweeps
can also be submitted as background jobs and polled.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import asdict

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..codes import GPS_CA, build_delay_table, generate_gold_code
from ..config import from_mapping
from ..harness import (
    BerPoint,
    bench_throughput,
    gain_at_ber,
    resolve_interferer_delays,
    run_sweep,
)
from .models import (
    BenchRequest,
    BenchResponse,
    CodeListResponse,
    CodeResponse,
    CrossingModel,
    DelayTableRequest,
    DelayTableResponse,
    GainRequest,
    GainResponse,
    HealthResponse,
    JobCreatedResponse,
    JobStatusResponse,
    SimulateRequest,
    SimulateResponse,
)

app = FastAPI(title="gwmmse", version=__version__)

_jobs: dict[str, dict] = {}
_jobs_lock = threading.Lock()


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


@app.get("/health", response_model=HealthResponse)
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/codes", response_model=CodeListResponse)
def list_codes(include_chips: bool = False) -> dict:
    codes = []
    for sv in sorted(GPS_CA.phase_select):
        seq = generate_gold_code(GPS_CA, sv)
        entry = {"sv": sv, "octal": seq.first_chips_octal()}
        if include_chips:
            entry["chips"] = [int(c) for c in seq.chips]
        codes.append(entry)
    return {"codes": codes}


@app.get("/codes/{sv}", response_model=CodeResponse)
def get_code(sv: int, include_chips: bool = True) -> dict:
    try:
        seq = generate_gold_code(GPS_CA, sv)
    except ValueError as exc:
        raise _bad_request(exc) from None
    entry = {"sv": sv, "octal": seq.first_chips_octal()}
    if include_chips:
        entry["chips"] = [int(c) for c in seq.chips]
    return entry


@app.post("/xcorr", response_model=DelayTableResponse)
def xcorr(req: DelayTableRequest) -> dict:
    try:
        table = build_delay_table(GPS_CA, req.sv, req.count)
    except ValueError as exc:
        raise _bad_request(exc) from None
    return {
        "sv": table.code_id,
        "entries": [{"delay": e.delay, "corr": e.corr} for e in table.entries],
    }


def _config_from_request(req: SimulateRequest):
    mapping = req.model_dump(exclude_none=True)
    return from_mapping(mapping)


def _point_dict(point: BerPoint) -> dict:
    return asdict(point)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> dict:
    try:
        config = _config_from_request(req)
        delays = resolve_interferer_delays(config)
        points = run_sweep(config)
    except (ValueError, RuntimeError) as exc:
        raise _bad_request(exc) from None
    return {
        "points": [_point_dict(p) for p in points],
        "interferer_delays": list(delays),
    }


def _job_worker(job_id: str, config) -> None:
    try:
        delays = resolve_interferer_delays(config)
        points = run_sweep(config)
    except Exception as exc:  # report, don't kill the worker thread
        with _jobs_lock:
            _jobs[job_id].update(status="error", detail=str(exc))
        return
    with _jobs_lock:
        _jobs[job_id].update(
            status="done",
            points=[_point_dict(p) for p in points],
            interferer_delays=list(delays),
        )


@app.post("/simulate/jobs", response_model=JobCreatedResponse, status_code=202)
def submit_simulation(req: SimulateRequest) -> dict:
    try:
        config = _config_from_request(req)
    except ValueError as exc:
        raise _bad_request(exc) from None
    job_id = uuid.uuid4().hex
    with _jobs_lock:
        _jobs[job_id] = {"status": "running"}
    worker = threading.Thread(
        target=_job_worker, args=(job_id, config), daemon=True
    )
    worker.start()
    return {"job_id": job_id}


@app.get("/simulate/jobs/{job_id}", response_model=JobStatusResponse)
def job_status(job_id: str) -> dict:
    with _jobs_lock:
        job = _jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job id")
        return {"job_id": job_id, **job}


@app.post("/gain", response_model=GainResponse)
def gain(req: GainRequest) -> dict:
    def to_points(models) -> list[BerPoint]:
        return [BerPoint(**m.model_dump()) for m in models]

    try:
        report = gain_at_ber(
            to_points(req.points_a), to_points(req.points_b), req.target_ber
        )
    except ValueError as exc:
        raise _bad_request(exc) from None

    def crossing(c) -> CrossingModel:
        return CrossingModel(
            curve=c.curve_id, status=c.status, isr_at_target=c.isr_at_target
        )

    return {
        "target_ber": report.target_ber,
        "curve_a": crossing(report.curve_a),
        "curve_b": crossing(report.curve_b),
        "gain_db": report.gain_db,
        "reached": report.reached,
    }


@app.post("/bench", response_model=BenchResponse)
def bench(req: BenchRequest) -> dict:
    overrides = {
        k: v
        for k, v in (
            ("g", req.g),
            ("window_l", req.window_l),
            ("noise_var", req.noise_var),
            ("n_interferers", req.n_interferers),
        )
        if v is not None
    }
    try:
        config = from_mapping(overrides)
        if req.detector not in ("mf", "mmse"):
            raise ValueError(f"detectors: unknown detector {req.detector!r}")
        eps = bench_throughput(config, duration=req.seconds, detector=req.detector)
    except ValueError as exc:
        raise _bad_request(exc) from None
    return {
        "detector": req.detector,
        "epochs_per_second": eps,
        "channels_realtime": int(eps // 1000),
    }

"""HTTP service exposing the compute, sweep, compare-conv, and slice runs."""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import DistboundError
from .. import runner
from .models import (
    CompareConvRequest,
    CompareConvResponse,
    ComputeRequest,
    ComputeResponse,
    SliceRequest,
    SliceResponse,
    SweepRequest,
    SweepResponse,
)

app = FastAPI(
    title="distbound",
    description="Distance-to-boundary estimation for 2-D binary shapes",
    version="0.1.0",
)


@app.exception_handler(DistboundError)
async def _domain_error(request: Request, exc: DistboundError) -> JSONResponse:
    return JSONResponse(
        status_code=400,
        content={
            "detail": str(exc),
            "error": type(exc).__name__,
            "stage": getattr(exc, "stage", None),
        },
    )


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/compute", response_model=ComputeResponse)
def compute(req: ComputeRequest) -> ComputeResponse:
    return runner.run_compute(req)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    return runner.run_sweep(req)


@app.post("/compare-conv", response_model=CompareConvResponse)
def compare_conv(req: CompareConvRequest) -> CompareConvResponse:
    return runner.run_compare_conv(req)


@app.post("/slice", response_model=SliceResponse)
def slice_field(req: SliceRequest) -> SliceResponse:
    return runner.run_slice(req)

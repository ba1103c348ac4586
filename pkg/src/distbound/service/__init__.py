from .models import (
    CompareConvRequest,
    CompareConvResponse,
    ComputeRequest,
    ComputeResponse,
    ReportRow,
    SliceRequest,
    SliceResponse,
    SweepRequest,
    SweepResponse,
)

__all__ = [
    "CompareConvRequest",
    "CompareConvResponse",
    "ComputeRequest",
    "ComputeResponse",
    "ReportRow",
    "SliceRequest",
    "SliceResponse",
    "SweepRequest",
    "SweepResponse",
]

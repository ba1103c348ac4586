"""Run orchestration shared by the HTTP endpoints and the CLI.

Every entry point takes a validated request model, computes in memory, writes
artifacts (CSV fields, CSV reports, PPM heatmaps) under the manifest's output
directory, and returns a response model. Identical manifests produce
byte-identical CSV output.
"""
from __future__ import annotations

import math
import warnings
from pathlib import Path

import numpy as np

from .convdist import BlendConfig, ConvOptions, blend_field, logconv_field, softmin_field
from .edt import edt_fast
from .errors import ClampWarning, DistboundError, EmptySlice
from .estimators import heat_log, normalize_gradient, taylor1, taylor2
from .grid import BinaryMask, BoundarySet, ScalarField, extract_boundary
from .metrics import error_l2, error_linf, error_map, slice_extract
from .poisson import SolverConfig, solve_bundle
from .service.models import (
    CompareConvRequest,
    CompareConvResponse,
    ComputeRequest,
    ComputeResponse,
    DIFFERENTIAL,
    ManifestBase,
    ReportRow,
    SliceRequest,
    SliceResponse,
    SweepRequest,
    SweepResponse,
)
from .shapeio import (
    format_value,
    parse_shape_spec,
    read_field_csv,
    read_mask_pgm,
    write_field_csv,
    write_heatmap_ppm,
)

_ESTIMATORS = {"heat": heat_log, "taylor1": taylor1, "taylor2": taylor2}


def _tag_stage(exc: DistboundError, stage: str) -> DistboundError:
    if not getattr(exc, "stage", None):
        exc.stage = stage
    return exc


def load_mask(req: ManifestBase) -> BinaryMask:
    try:
        if req.input is not None:
            return read_mask_pgm(Path(req.input).read_bytes())
        return parse_shape_spec(req.shape)
    except FileNotFoundError as exc:
        err = DistboundError(f"cannot read input: {exc}")
        raise _tag_stage(err, "input") from exc
    except DistboundError as exc:
        raise _tag_stage(exc, "input")


def _normalize_default(method: str, requested: bool | None) -> bool:
    if method in DIFFERENTIAL:
        return True if requested is None else requested
    return False  # convolutional methods are never normalized


def evaluate_method(
    mask: BinaryMask,
    boundary: BoundarySet,
    exact: ScalarField,
    method: str,
    lam: float,
    *,
    K: float = 0.1,
    d: int = 1,
    prefactor: bool = True,
    normalize: bool | None = None,
    rel_tol: float = 1e-10,
) -> tuple[ScalarField, bool, list[str]]:
    """Compute one method's distance field; returns (field, normalized, flags)."""
    flags: list[str] = []
    normalized = _normalize_default(method, normalize)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ClampWarning)
        if method == "exact":
            fld = exact
        elif method == "softmin":
            fld = softmin_field(mask, boundary, ConvOptions(lam=lam))
        elif method == "logconv":
            fld = logconv_field(
                mask, boundary, ConvOptions(lam=lam, include_prefactor=prefactor, boundary_dim=d)
            )
        elif method == "blend":
            soft = softmin_field(mask, boundary, ConvOptions(lam=lam))
            logc = logconv_field(
                mask, boundary, ConvOptions(lam=lam, include_prefactor=True, boundary_dim=d)
            )
            fld = blend_field(soft, logc, BlendConfig(lam=lam, K=K, boundary_dim=d))
        elif method in _ESTIMATORS:
            bundle = solve_bundle(mask, SolverConfig(lam=lam, rel_tol=rel_tol))
            flags.extend(bundle.flags)
            fld = _ESTIMATORS[method](bundle)
        else:
            raise DistboundError(f"unknown method {method!r}")
        if normalized:
            fld, res = normalize_gradient(fld, mask, SolverConfig(lam=lam, rel_tol=rel_tol))
            if not res.converged:
                flags.append("no_convergence:normalize")
    if any(issubclass(w.category, ClampWarning) for w in caught):
        flags.append("clamp")
    return fld, normalized, flags


def _fmt(x: float | None) -> str:
    return "nan" if x is None else format_value(x)


def _report_line(row: ReportRow, with_normalized: bool) -> str:
    cells = [row.method]
    if with_normalized:
        cells.append("true" if row.normalized else "false")
    cells += [_fmt(row.t), _fmt(row.l2), _fmt(row.linf), ";".join(row.flags)]
    return ",".join(cells)


def run_compute(req: ComputeRequest) -> ComputeResponse:
    """Single (method, parameter) run: field CSV, error CSV, heatmap, report row."""
    mask = load_mask(req)
    boundary = extract_boundary(mask)
    exact = edt_fast(mask, boundary)
    lam = req.lam_value()
    try:
        fld, normalized, flags = evaluate_method(
            mask, boundary, exact, req.method, lam,
            K=req.K, d=req.d, prefactor=req.prefactor,
            normalize=req.normalize, rel_tol=req.rel_tol,
        )
        err = error_map(fld, exact, mask)
        row = ReportRow(
            method=req.method,
            normalized=normalized,
            t=None if req.method == "exact" else 1.0 / (lam * lam),
            l2=error_l2(fld, exact, mask),
            linf=error_linf(fld, exact, mask),
            n_nodes=int(mask.inside.sum()),
            flags=flags,
        )
    except DistboundError as exc:
        raise _tag_stage(exc, "method")
    try:
        out = Path(req.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "field": str(out / f"{req.method}_field.csv"),
            "error": str(out / f"{req.method}_error.csv"),
            "heatmap": str(out / f"{req.method}_error.ppm"),
            "report": str(out / "report.csv"),
        }
        Path(files["field"]).write_bytes(write_field_csv(fld))
        Path(files["error"]).write_bytes(write_field_csv(err))
        Path(files["heatmap"]).write_bytes(write_heatmap_ppm(err))
        report = "method,t,l2,linf,flags\n" + _report_line(row, with_normalized=False) + "\n"
        Path(files["report"]).write_bytes(report.encode())
    except OSError as exc:
        raise _tag_stage(DistboundError(f"cannot write artifacts: {exc}"), "output") from exc
    return ComputeResponse(row=row, files=files)


def _sweep_variants(method: str) -> tuple[bool, ...]:
    return (False, True) if method in DIFFERENTIAL else (False,)


def run_sweep(req: SweepRequest) -> SweepResponse:
    """Error table over the (method, normalized, t) grid; failures become flagged rows."""
    mask = load_mask(req)
    boundary = extract_boundary(mask)
    exact = edt_fast(mask, boundary)
    if req.log_grid:
        ts = np.geomspace(req.t_min, req.t_max, req.t_steps)
    else:
        ts = np.linspace(req.t_min, req.t_max, req.t_steps)
    n_nodes = int(mask.inside.sum())
    cells: dict[tuple[str, bool, int], ReportRow] = {}
    for it, t in enumerate(ts):
        lam = 1.0 / math.sqrt(float(t))
        bundle_fields: dict[str, tuple[ScalarField, list[str]]] = {}
        if any(m in DIFFERENTIAL for m in req.methods):
            bundle = solve_bundle(mask, SolverConfig(lam=lam, rel_tol=req.rel_tol))
            for m in req.methods:
                if m in DIFFERENTIAL and m not in bundle_fields:
                    with warnings.catch_warnings(record=True) as caught:
                        warnings.simplefilter("always", ClampWarning)
                        fld = _ESTIMATORS[m](bundle)
                    fl = list(bundle.flags)
                    if any(issubclass(w.category, ClampWarning) for w in caught):
                        fl.append("clamp")
                    bundle_fields[m] = (fld, fl)
        for m in req.methods:
            for normalized in _sweep_variants(m):
                try:
                    if m in DIFFERENTIAL:
                        fld, base_flags = bundle_fields[m]
                        flags = list(base_flags)
                        if normalized:
                            fld, res = normalize_gradient(
                                fld, mask, SolverConfig(lam=lam, rel_tol=req.rel_tol)
                            )
                            if not res.converged:
                                flags.append("no_convergence:normalize")
                    else:
                        fld, _, flags = evaluate_method(
                            mask, boundary, exact, m, lam,
                            K=req.K, d=req.d, prefactor=req.prefactor,
                            normalize=False, rel_tol=req.rel_tol,
                        )
                    row = ReportRow(
                        method=m, normalized=normalized, t=float(t),
                        l2=error_l2(fld, exact, mask), linf=error_linf(fld, exact, mask),
                        n_nodes=n_nodes, flags=flags,
                    )
                except DistboundError as exc:
                    row = ReportRow(
                        method=m, normalized=normalized, t=float(t),
                        l2=None, linf=None, n_nodes=n_nodes,
                        flags=[f"error:{type(exc).__name__}"],
                    )
                cells[(m, normalized, it)] = row
    rows = [
        cells[(m, normalized, it)]
        for m in req.methods
        for normalized in _sweep_variants(m)
        for it in range(len(ts))
    ]
    out = Path(req.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    body = "method,normalized,t,l2,linf,flags\n" + "".join(
        _report_line(r, with_normalized=True) + "\n" for r in rows
    )
    path.write_bytes(body.encode())
    return SweepResponse(rows=rows, files={"sweep": str(path)})


def run_compare_conv(req: CompareConvRequest) -> CompareConvResponse:
    """Convolutional comparison: slice CSV, per-column error CSV, two heatmaps."""
    mask = load_mask(req)
    boundary = extract_boundary(mask)
    exact = edt_fast(mask, boundary)
    lam = req.lam_value()
    try:
        soft = softmin_field(mask, boundary, ConvOptions(lam=lam))
        logc_pre = logconv_field(
            mask, boundary, ConvOptions(lam=lam, include_prefactor=True, boundary_dim=req.d)
        )
        blend = blend_field(soft, logc_pre, BlendConfig(lam=lam, K=req.K, boundary_dim=req.d))
        logc_shown = logc_pre if req.prefactor else logconv_field(
            mask, boundary, ConvOptions(lam=lam, include_prefactor=False, boundary_dim=req.d)
        )
    except DistboundError as exc:
        raise _tag_stage(exc, "method")
    row_index = req.row
    if row_index < 0:
        inside_rows = np.nonzero(mask.inside.any(axis=1))[0]
        row_index = int(inside_rows[len(inside_rows) // 2])
    try:
        cols, exact_vals = slice_extract(exact, row_index)
    except EmptySlice as exc:
        raise _tag_stage(exc, "slice")
    series = {
        "exact": exact_vals,
        "logconv": logc_shown.values[row_index, cols],
        "softmin": soft.values[row_index, cols],
        "blend": blend.values[row_index, cols],
    }
    l2 = {
        "softmin": error_l2(soft, exact, mask),
        "logconv": error_l2(logc_shown, exact, mask),
        "blend": error_l2(blend, exact, mask),
    }
    err_soft = error_map(soft, exact, mask)
    err_blend = error_map(blend, exact, mask)
    scale = max(
        float(err_soft.values[mask.inside].max()), float(err_blend.values[mask.inside].max())
    ) or None  # shared colour scale; None lets the writer pick when both maps are zero
    out = Path(req.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "slice": str(out / "slice.csv"),
        "error_curve": str(out / "error_curve.csv"),
        "softmin_heatmap": str(out / "softmin_error.ppm"),
        "blend_heatmap": str(out / "blend_error.ppm"),
    }
    slice_body = "col,exact,logconv,softmin,blend\n" + "".join(
        f"{c},{format_value(series['exact'][i])},{format_value(series['logconv'][i])},"
        f"{format_value(series['softmin'][i])},{format_value(series['blend'][i])}\n"
        for i, c in enumerate(cols)
    )
    curve_body = "col,logconv,softmin,blend\n" + "".join(
        f"{c},{format_value(abs(series['logconv'][i] - series['exact'][i]))},"
        f"{format_value(abs(series['softmin'][i] - series['exact'][i]))},"
        f"{format_value(abs(series['blend'][i] - series['exact'][i]))}\n"
        for i, c in enumerate(cols)
    )
    Path(files["slice"]).write_bytes(slice_body.encode())
    Path(files["error_curve"]).write_bytes(curve_body.encode())
    Path(files["softmin_heatmap"]).write_bytes(write_heatmap_ppm(err_soft, scale))
    Path(files["blend_heatmap"]).write_bytes(write_heatmap_ppm(err_blend, scale))
    return CompareConvResponse(l2=l2, files=files)


def run_slice(req: SliceRequest) -> SliceResponse:
    """Extract one row of a stored field CSV (all finite cells of the row)."""
    try:
        values = read_field_csv(Path(req.field).read_bytes())
    except FileNotFoundError as exc:
        raise _tag_stage(DistboundError(f"cannot read field: {exc}"), "input") from exc
    except DistboundError as exc:
        raise _tag_stage(exc, "input")
    if not 0 <= req.row < values.shape[0]:
        raise _tag_stage(EmptySlice(f"row {req.row} outside the grid"), "slice")
    finite = np.isfinite(values[req.row])
    cols = np.nonzero(finite)[0]
    if cols.size == 0:
        raise _tag_stage(EmptySlice(f"row {req.row} has no defined nodes"), "slice")
    return SliceResponse(
        row=req.row, columns=[int(c) for c in cols],
        values=[float(values[req.row, c]) for c in cols],
    )

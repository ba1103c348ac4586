"""Thin command-line client.

Each subcommand builds the same request model the HTTP endpoints consume and
dispatches it either in-process (default) or to a running service via
``--server``. Exit codes: 0 clean, 1 when any cell carries diagnostic flags,
2 on fatal errors.
"""
from __future__ import annotations

import sys

import click

from . import runner
from .errors import DistboundError
from .service.models import (
    CompareConvRequest,
    CompareConvResponse,
    ComputeRequest,
    ComputeResponse,
    SliceRequest,
    SliceResponse,
    SweepRequest,
    SweepResponse,
)

_ENDPOINTS = {
    ComputeRequest: ("/compute", ComputeResponse, runner.run_compute),
    SweepRequest: ("/sweep", SweepResponse, runner.run_sweep),
    CompareConvRequest: ("/compare-conv", CompareConvResponse, runner.run_compare_conv),
    SliceRequest: ("/slice", SliceResponse, runner.run_slice),
}


def _dispatch(req, server: str | None):
    path, resp_model, local = _ENDPOINTS[type(req)]
    if server is None:
        return local(req)
    import httpx

    r = httpx.post(
        server.rstrip("/") + path,
        json=req.model_dump(mode="json", by_alias=True),
        timeout=600.0,
    )
    if r.status_code != 200:
        try:
            detail = r.json().get("detail", r.text)
            stage = r.json().get("stage")
        except Exception:
            detail, stage = r.text, None
        exc = DistboundError(detail)
        exc.stage = stage
        raise exc
    return resp_model.model_validate(r.json())


def _fatal(exc: Exception) -> "typing.NoReturn":  # noqa: F821
    stage = getattr(exc, "stage", None)
    where = f" (stage: {stage})" if stage else ""
    click.echo(f"error{where}: {exc}", err=True)
    sys.exit(2)


def _finish(rows) -> None:
    flagged = any(r.flags for r in rows)
    sys.exit(1 if flagged else 0)


def _input_options(fn):
    fn = click.option("--input", "input_", type=str, default=None,
                      help="Path to a PGM mask (P2 or P5).")(fn)
    fn = click.option("--shape", type=str, default=None,
                      help="Builtin shape spec, e.g. disk:r=20,canvas=64.")(fn)
    fn = click.option("--out", "out_dir", type=str, required=True,
                      help="Output directory for artifacts.")(fn)
    fn = click.option("--K", "k_const", type=float, default=0.1, show_default=True,
                      help="Heuristic blend constant (must be positive).")(fn)
    fn = click.option("--d", "d", type=click.IntRange(1, 2), default=1, show_default=True,
                      help="Boundary manifold dimension.")(fn)
    fn = click.option("--no-normalize", is_flag=True,
                      help="Skip gradient normalization for differential methods.")(fn)
    fn = click.option("--no-prefactor", is_flag=True,
                      help="Drop the lambda^d prefactor from the logconv estimate.")(fn)
    fn = click.option("--rel-tol", type=float, default=1e-10, show_default=True,
                      help="Relative tolerance of the linear solver.")(fn)
    fn = click.option("--server", type=str, default=None,
                      help="Base URL of a running service; default runs in-process.")(fn)
    return fn


@click.group()
def main() -> None:
    """Distance-to-boundary estimation and benchmarking on binary images."""


@main.command()
@_input_options
@click.option("--method", required=True,
              type=click.Choice(["exact", "logconv", "softmin", "blend", "heat", "taylor1", "taylor2"]))
@click.option("--t", type=float, default=None, help="Diffusion-style parameter t = 1/lambda^2.")
@click.option("--lambda", "lam", type=float, default=None, help="Kernel decay rate lambda.")
def compute(input_, shape, out_dir, k_const, d, no_normalize, no_prefactor, rel_tol, server,
            method, t, lam):
    """Run one method at one parameter and write field, error map, heatmap, report."""
    try:
        req = ComputeRequest(
            input=input_, shape=shape, method=method, t=t, lam=lam,
            K=k_const, d=d, normalize=False if no_normalize else None,
            prefactor=not no_prefactor, out_dir=out_dir, rel_tol=rel_tol,
        )
        resp = _dispatch(req, server)
    except (DistboundError, ValueError) as exc:
        _fatal(exc)
    r = resp.row
    t_str = "nan" if r.t is None else format(r.t, ".6g")
    click.echo(f"method={r.method} normalized={str(r.normalized).lower()} "
               f"t={t_str} l2={r.l2:.9g} linf={r.linf:.9g} "
               f"flags={';'.join(r.flags)}")
    for label, path in resp.files.items():
        click.echo(f"  {label}: {path}")
    _finish([r])


@main.command()
@_input_options
@click.option("--methods", required=True,
              help="Comma-separated method list, e.g. heat,taylor1,taylor2.")
@click.option("--t-min", type=float, default=0.2, show_default=True)
@click.option("--t-max", type=float, default=10.0, show_default=True)
@click.option("--t-steps", type=int, default=25, show_default=True)
@click.option("--log-grid/--linear-grid", default=True, show_default=True)
def sweep(input_, shape, out_dir, k_const, d, no_normalize, no_prefactor, rel_tol, server,
          methods, t_min, t_max, t_steps, log_grid):
    """Sweep methods over a t grid and write one CSV error table."""
    try:
        req = SweepRequest(
            input=input_, shape=shape, methods=[m.strip() for m in methods.split(",") if m.strip()],
            t_min=t_min, t_max=t_max, t_steps=t_steps, log_grid=log_grid,
            K=k_const, d=d, normalize=False if no_normalize else None,
            prefactor=not no_prefactor, out_dir=out_dir, rel_tol=rel_tol,
        )
        resp = _dispatch(req, server)
    except (DistboundError, ValueError) as exc:
        _fatal(exc)
    click.echo(f"sweep: {len(resp.rows)} rows -> {resp.files['sweep']}")
    _finish(resp.rows)


@main.command("compare-conv")
@_input_options
@click.option("--t", type=float, default=None, help="Diffusion-style parameter t = 1/lambda^2.")
@click.option("--lambda", "lam", type=float, default=None, help="Kernel decay rate lambda.")
@click.option("--row", type=int, default=-1, show_default=True,
              help="Slice row index; -1 picks the centre row of the inside set.")
def compare_conv(input_, shape, out_dir, k_const, d, no_normalize, no_prefactor, rel_tol, server,
                 t, lam, row):
    """Compare logconv, softmin, and their blend against the exact distance."""
    try:
        req = CompareConvRequest(
            input=input_, shape=shape, t=t, lam=lam, row=row,
            K=k_const, d=d, prefactor=not no_prefactor, out_dir=out_dir, rel_tol=rel_tol,
        )
        resp = _dispatch(req, server)
    except (DistboundError, ValueError) as exc:
        _fatal(exc)
    for m, v in resp.l2.items():
        click.echo(f"l2[{m}] = {v:.9g}")
    for label, path in resp.files.items():
        click.echo(f"  {label}: {path}")
    sys.exit(0)


@main.command("slice")
@click.option("--field", required=True, type=str, help="Path to a field CSV.")
@click.option("--row", required=True, type=int)
@click.option("--server", type=str, default=None)
def slice_cmd(field, row, server):
    """Print one row of a stored field as CSV (column,value per line)."""
    try:
        resp = _dispatch(SliceRequest(field=field, row=row), server)
    except (DistboundError, ValueError) as exc:
        _fatal(exc)
    click.echo("col,value")
    for c, v in zip(resp.columns, resp.values):
        click.echo(f"{c},{v:.9g}")
    sys.exit(0)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("distbound.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()

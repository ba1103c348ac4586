"""Distance estimates from a PDE bundle, plus the gradient-normalisation step.

When the bundle is synthesised from an exact distance d via v = exp(-lam d),
v' = -d v, v'' = d^2 v, all three estimators return d identically; their
differences measure how far the solved v is from that exponential profile.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ClampWarning
from .grid import BinaryMask, ScalarField, VectorField, divergence, field_from_inside, gradient
from .poisson import PdeBundle, ScreenedOperator, SolveResult, SolverConfig, solve_spd

V_FLOOR = 1e-300


@dataclass(frozen=True)
class EstimatorKind:
    variant: str  # heat_log | taylor1 | taylor2
    normalized: bool = False

    def tag(self) -> str:
        return self.variant + ("_n" if self.normalized else "")


def _finalize(bundle: PdeBundle, vals: np.ndarray, bad: np.ndarray) -> ScalarField:
    """Saturate garbage nodes at the clamp distance and emit the diagnostic warning.

    Nodes where v lost positivity (or where ratio arithmetic overflowed)
    carry no usable signal; they all get -log(V_FLOOR)/lambda, the value
    heat_log assigns at the clamp floor, so the three estimators stay
    mutually consistent there.
    """
    bad = bad | ~np.isfinite(vals)
    if bad.any():
        vals = vals.copy()
        vals[bad] = -math.log(V_FLOOR) / bundle.lam
        warnings.warn(
            f"positivity clamp applied at {int(bad.sum())} node(s)", ClampWarning, stacklevel=3
        )
    return field_from_inside(bundle.v.mask, vals, boundary_value=0.0)


def _clamped_v(bundle: PdeBundle) -> tuple[np.ndarray, np.ndarray]:
    v = bundle.v.values[bundle.v.mask.inside]
    return np.maximum(v, V_FLOOR), v < V_FLOOR


def heat_log(bundle: PdeBundle) -> ScalarField:
    """Log-based estimate -log(v)/lambda; 0 on boundary nodes."""
    v, bad = _clamped_v(bundle)
    vals = -np.log(v) / bundle.lam
    return _finalize(bundle, vals, bad)


def taylor1(bundle: PdeBundle) -> ScalarField:
    """First-order extrapolation -v'/v; 0 on boundary nodes."""
    v, bad = _clamped_v(bundle)
    vp = bundle.v_prime.values[bundle.v.mask.inside]
    return _finalize(bundle, -vp / v, bad)


def taylor2(bundle: PdeBundle) -> ScalarField:
    """Second-order extrapolation -v'/v - (lam/2) [v''/v - (v'/v)^2]."""
    ins = bundle.v.mask.inside
    v, bad = _clamped_v(bundle)
    with np.errstate(over="ignore", invalid="ignore"):
        r1 = bundle.v_prime.values[ins] / v
        r2 = bundle.v_second.values[ins] / v
        vals = -r1 - 0.5 * bundle.lam * (r2 - r1 * r1)
    return _finalize(bundle, vals, bad)


def normalize_gradient(
    w: ScalarField,
    mask: BinaryMask,
    config: SolverConfig | None = None,
    eps_g: float = 1e-12,
) -> tuple[ScalarField, SolveResult]:
    """Re-integrate the unit gradient of ``w`` through a Poisson solve.

    g = grad w / max(|grad w|, eps_g) with g = 0 where the gradient
    magnitude drops below eps_g (critical points on the medial axis); then
    -L_h w_n = -div g with zero Dirichlet data. The result is invariant
    under positive scaling of ``w``.
    """
    g = gradient(w, mask, boundary_value=0.0)
    mag = np.hypot(g.x, g.y)
    scale = np.where(mag >= eps_g, mag, np.inf)
    gx = g.x / scale
    gy = g.y / scale
    div = divergence(VectorField(mask=mask, x=gx, y=gy), mask)
    op = ScreenedOperator(mask, 0.0)
    rel_tol = config.rel_tol if config is not None else 1e-10
    max_iters = config.max_iters if config is not None else None
    res = solve_spd(op, -div.values[mask.inside], rel_tol=rel_tol, max_iters=max_iters)
    return field_from_inside(mask, res.x, boundary_value=0.0), res

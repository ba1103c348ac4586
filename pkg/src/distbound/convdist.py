"""Convolutional distance estimators and their accuracy-improving blend.

Two smooth-minimum forms over the boundary samples, evaluated per inside
node with kernel exp(-lambda * distance):

* log-sum-exp ("logconv"): underestimates the true minimum when weights are
  1 and no prefactor is applied;
* self-normalised average ("softmin"): always overestimates the minimum.

Both are accumulated in shifted form (factor out the kernel at the nearest
sample), which bounds the sums near 1 and makes the one-sided bracketing
hold in floating point, not just in exact arithmetic.

The blend combines softmin with the prefactored logconv using weights that
cancel the leading asymptotic error terms of the two forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadConfig, BadLambda, DegenerateSum
from .grid import (
    BinaryMask,
    BoundarySet,
    ScalarField,
    field_from_inside,
    require_same_mask,
    validate_mask,
)


@dataclass(frozen=True)
class ConvOptions:
    """Kernel parameters for the convolutional estimators.

    ``cutoff_epsilon`` truncates kernel terms smaller than this fraction of
    the leading one; None disables truncation. ``boundary_dim`` is the
    dimension of the boundary manifold (1 for a planar region's contour).
    """

    lam: float
    include_prefactor: bool = False
    cutoff_epsilon: float | None = 1e-12
    boundary_dim: int = 1

    def __post_init__(self):
        if not self.lam > 0:
            raise BadConfig(f"lambda must be positive, got {self.lam}")
        if self.cutoff_epsilon is not None and not 0 < self.cutoff_epsilon < 1:
            raise BadConfig(f"cutoff_epsilon must lie in (0, 1), got {self.cutoff_epsilon}")
        if self.boundary_dim not in (1, 2):
            raise BadConfig(f"boundary_dim must be 1 or 2, got {self.boundary_dim}")


@dataclass(frozen=True)
class BlendConfig:
    """Convex weights for combining softmin with prefactored logconv.

    ``alpha`` multiplies softmin, ``beta`` logconv; they are derived from
    (lam, K, boundary_dim) and sum to one.
    """

    lam: float
    K: float = 0.1
    boundary_dim: int = 1

    @property
    def alpha(self) -> float:
        return blend_weights(self.lam, self.K, self.boundary_dim)[0]

    @property
    def beta(self) -> float:
        return blend_weights(self.lam, self.K, self.boundary_dim)[1]


def blend_weights(lam: float, K: float, d: int = 1) -> tuple[float, float]:
    """Weights (alpha, beta) = (d log lam, 2K) / (2K + d log lam).

    Requires lam > 1 so both weights stay in (0, 1), and K > 0.
    """
    if K <= 0:
        raise BadConfig(f"K must be positive, got {K}")
    if lam <= 1:
        raise BadLambda(f"blend weights need lambda > 1, got {lam}")
    dl = d * math.log(lam)
    alpha = dl / (2 * K + dl)
    beta = 2 * K / (2 * K + dl)
    return alpha, beta


def softmin_values(
    phi: np.ndarray, lam: float, weights: np.ndarray | None = None,
    cutoff_epsilon: float | None = 1e-12,
) -> np.ndarray:
    """Kernel-weighted average of sample values phi, row-wise.

    ``phi`` has shape (n_points, n_samples). The result never drops below
    the row minimum: it is computed as min + nonnegative correction.
    """
    phi = np.atleast_2d(np.asarray(phi, dtype=np.float64))
    n, m = phi.shape
    w = np.ones(m) if weights is None else np.asarray(weights, dtype=np.float64)
    pmin = phi.min(axis=1, keepdims=True)
    delta = lam * (phi - pmin)
    kern = np.exp(-delta) * w
    if cutoff_epsilon is not None:
        kern[delta > -math.log(cutoff_epsilon)] = 0.0
    den = kern.sum(axis=1)
    if not (den > 0).all():
        raise DegenerateSum("kernel denominator vanished despite shifting")
    num = ((phi - pmin) * kern).sum(axis=1)
    return pmin[:, 0] + num / den


def logconv_values(
    phi: np.ndarray, lam: float, weights: np.ndarray | None = None,
    include_prefactor: bool = False, d: int = 1,
    cutoff_epsilon: float | None = 1e-12,
) -> np.ndarray:
    """Shifted log-sum-exp estimate -log(P * sum w exp(-lam phi)) / lam, row-wise.

    P = lam**d when ``include_prefactor`` else 1. With unit weights and no
    prefactor the result is min - log1p(tail)/lam, hence never above the
    row minimum in floating point.
    """
    phi = np.atleast_2d(np.asarray(phi, dtype=np.float64))
    n, m = phi.shape
    unit = weights is None
    w = np.ones(m) if unit else np.asarray(weights, dtype=np.float64)
    unit = unit or bool(np.all(w == 1.0))
    pmin = phi.min(axis=1, keepdims=True)
    argmin = phi.argmin(axis=1)
    delta = lam * (phi - pmin)
    kern = np.exp(-delta) * w
    if cutoff_epsilon is not None:
        kern[delta > -math.log(cutoff_epsilon)] = 0.0
    rows = np.arange(n)
    lead = kern[rows, argmin].copy()
    kern[rows, argmin] = 0.0
    tail = kern.sum(axis=1)
    if unit and not include_prefactor:
        log_s = np.log1p(tail)
    else:
        log_s = np.log(lead + tail)
        if include_prefactor:
            log_s = log_s + d * math.log(lam)
    return pmin[:, 0] - log_s / lam


def _pairwise_distances(mask: BinaryMask, boundary: BoundarySet) -> np.ndarray:
    pts = np.argwhere(mask.inside).astype(np.int64)
    bnd = boundary.points.astype(np.int64)
    dr = pts[:, 0:1] - bnd[None, :, 0]
    dc = pts[:, 1:2] - bnd[None, :, 1]
    return np.sqrt((dr * dr + dc * dc).astype(np.float64)) * mask.spacing


def softmin_field(mask: BinaryMask, boundary: BoundarySet, opts: ConvOptions) -> ScalarField:
    """Softmin distance estimate at every inside node; 0 on boundary nodes."""
    validate_mask(mask)
    vals = _eval_chunked(
        mask, boundary,
        lambda phi, w: softmin_values(phi, opts.lam, w, opts.cutoff_epsilon),
    )
    return field_from_inside(mask, vals, boundary_value=0.0)


def logconv_field(mask: BinaryMask, boundary: BoundarySet, opts: ConvOptions) -> ScalarField:
    """Logconv distance estimate at every inside node; 0 on boundary nodes."""
    validate_mask(mask)
    vals = _eval_chunked(
        mask, boundary,
        lambda phi, w: logconv_values(
            phi, opts.lam, w, opts.include_prefactor, opts.boundary_dim, opts.cutoff_epsilon,
        ),
    )
    return field_from_inside(mask, vals, boundary_value=0.0)


_CHUNK = 1 << 22


def _eval_chunked(mask, boundary, kernel) -> np.ndarray:
    pts = np.argwhere(mask.inside).astype(np.int64)
    bnd = boundary.points.astype(np.int64)
    w = boundary.weights
    n = pts.shape[0]
    out = np.empty(n)
    step = max(1, _CHUNK // max(1, bnd.shape[0]))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        dr = pts[lo:hi, 0:1] - bnd[None, :, 0]
        dc = pts[lo:hi, 1:2] - bnd[None, :, 1]
        phi = np.sqrt((dr * dr + dc * dc).astype(np.float64)) * mask.spacing
        out[lo:hi] = kernel(phi, w)
    return out


def blend_field(soft: ScalarField, logc: ScalarField, cfg: BlendConfig) -> ScalarField:
    """Node-wise alpha * softmin + beta * logconv.

    ``logc`` is expected to carry the lam**d prefactor; the weights cancel
    the leading error terms only for that variant.
    """
    require_same_mask(soft, logc)
    alpha, beta = blend_weights(cfg.lam, cfg.K, cfg.boundary_dim)
    ins = soft.mask.inside
    vals = alpha * soft.values[ins] + beta * logc.values[ins]
    return field_from_inside(soft.mask, vals, boundary_value=0.0)

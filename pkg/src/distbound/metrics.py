"""Error quantification and slice extraction.

The L2 error is a root-mean-square over inside nodes (mean, not sum), so
values are comparable across resolutions. Boundary nodes are excluded from
all norms: every method is exact there by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySlice
from .grid import BinaryMask, ScalarField, VectorField, gradient, require_same_mask


@dataclass(frozen=True)
class ErrorReport:
    """L2/Linf errors and metadata for one (method, parameter, shape) run."""

    method: str
    t: float
    l2: float
    linf: float
    n_nodes: int
    normalized: bool = False
    flags: tuple[str, ...] = ()


def error_l2(approx: ScalarField, exact: ScalarField, mask: BinaryMask) -> float:
    """RMS of the difference over inside nodes."""
    require_same_mask(approx, exact)
    diff = approx.values[mask.inside] - exact.values[mask.inside]
    return float(math.sqrt(np.mean(diff * diff)))


def error_linf(approx: ScalarField, exact: ScalarField, mask: BinaryMask) -> float:
    """Maximum absolute difference over inside nodes."""
    require_same_mask(approx, exact)
    diff = approx.values[mask.inside] - exact.values[mask.inside]
    return float(np.abs(diff).max())


def error_map(approx: ScalarField, exact: ScalarField, mask: BinaryMask) -> ScalarField:
    """Node-wise absolute difference, defined on inside nodes only."""
    require_same_mask(approx, exact)
    values = np.full(mask.inside.shape, np.nan)
    ins = mask.inside
    values[ins] = np.abs(approx.values[ins] - exact.values[ins])
    return ScalarField(mask=mask, values=values, defined=ins.copy())


def slice_extract(fld: ScalarField, row_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Values along one row restricted to inside nodes, column-ordered.

    Returns (columns, values); raises EmptySlice when the row misses the
    inside set.
    """
    if not 0 <= row_index < fld.mask.height:
        raise EmptySlice(f"row {row_index} outside the grid")
    ins_row = fld.mask.inside[row_index]
    cols = np.nonzero(ins_row)[0]
    if cols.size == 0:
        raise EmptySlice(f"row {row_index} does not intersect the inside set")
    return cols, fld.values[row_index, cols]


def gradient_magnitude_map(fld: ScalarField, mask: BinaryMask) -> ScalarField:
    """|grad field| on inside nodes (high values trace the shape skeleton)."""
    g = gradient(fld, mask, boundary_value=0.0)
    values = np.full(mask.inside.shape, np.nan)
    ins = mask.inside
    values[ins] = np.hypot(g.x, g.y)[ins]
    return ScalarField(mask=mask, values=values, defined=ins.copy())

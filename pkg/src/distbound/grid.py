"""Grid containers, mask validation, boundary extraction, and finite-difference stencils.

The domain is a binary image. Inside nodes form the region of interest; the
discrete boundary is the set of background nodes 4-adjacent to at least one
inside node. Dirichlet data lives on those boundary nodes, and every inside
node has all four neighbours on the grid because a one-pixel background
margin is enforced.

Axis convention: arrays are indexed ``[row, col]``; the x-derivative runs
along columns, the y-derivative along rows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyMask, MaskMismatch, MaskTouchesBorder, TooSmall


@dataclass(frozen=True)
class BinaryMask:
    """Rectangular inside/outside grid with node spacing ``spacing`` (pixel units).

    ``inside`` is a bool array of shape (height, width), row-major.
    """

    inside: np.ndarray
    spacing: float = 1.0

    @property
    def height(self) -> int:
        return self.inside.shape[0]

    @property
    def width(self) -> int:
        return self.inside.shape[1]

    def same_domain(self, other: "BinaryMask") -> bool:
        return (
            self.inside.shape == other.inside.shape
            and self.spacing == other.spacing
            and bool(np.array_equal(self.inside, other.inside))
        )


@dataclass(frozen=True)
class BoundarySet:
    """Discrete boundary samples: background nodes 4-adjacent to the inside set.

    ``points`` is an int array of (row, col) pairs in row-major order;
    ``weights`` holds one quadrature length per sample (default: the grid
    spacing, a uniform arc-length proxy).
    """

    points: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class ScalarField:
    """Real value per node, defined on the inside set and usually on the boundary.

    Nodes outside ``defined`` carry NaN and are excluded from norms.
    """

    mask: BinaryMask
    values: np.ndarray
    defined: np.ndarray

    def inside_values(self) -> np.ndarray:
        return self.values[self.mask.inside]


@dataclass(frozen=True)
class VectorField:
    """Two derivative components per node, defined exactly on inside nodes."""

    mask: BinaryMask
    x: np.ndarray
    y: np.ndarray


def validate_mask(mask: BinaryMask) -> None:
    """Raise unless all mask invariants hold.

    Invariants: dimensions at least 3x3, at least one inside node, and no
    inside node on the image border.
    """
    if mask.height < 3 or mask.width < 3:
        raise TooSmall(f"grid {mask.width}x{mask.height} is below the minimal 3x3")
    ins = mask.inside
    if not ins.any():
        raise EmptyMask("mask has no inside node")
    if ins[0, :].any() or ins[-1, :].any() or ins[:, 0].any() or ins[:, -1].any():
        raise MaskTouchesBorder("inside nodes must keep a one-pixel background margin")
    if mask.spacing <= 0:
        raise TooSmall(f"spacing must be positive, got {mask.spacing}")


def shifted(a: np.ndarray, dr: int, dc: int, fill) -> np.ndarray:
    """Array b with b[r, c] = a[r + dr, c + dc]; out-of-range entries get ``fill``."""
    h, w = a.shape
    out = np.full_like(a, fill)
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r0 < r1 and c0 < c1:
        out[r0:r1, c0:c1] = a[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
    return out


def neighbor_count_inside(mask: BinaryMask) -> np.ndarray:
    """Number of inside 4-neighbours per node (int array)."""
    ins = mask.inside.astype(np.int64)
    return (
        shifted(ins, 1, 0, 0)
        + shifted(ins, -1, 0, 0)
        + shifted(ins, 0, 1, 0)
        + shifted(ins, 0, -1, 0)
    )


def extract_boundary(mask: BinaryMask) -> BoundarySet:
    """Background nodes 4-adjacent to an inside node, in row-major order.

    Each sample carries quadrature weight equal to the grid spacing.
    """
    validate_mask(mask)
    on_boundary = (~mask.inside) & (neighbor_count_inside(mask) > 0)
    points = np.argwhere(on_boundary)
    weights = np.full(points.shape[0], mask.spacing, dtype=np.float64)
    return BoundarySet(points=points, weights=weights)


def boundary_mask(mask: BinaryMask) -> np.ndarray:
    """Bool array marking the discrete boundary nodes."""
    return (~mask.inside) & (neighbor_count_inside(mask) > 0)


def field_from_inside(
    mask: BinaryMask, inside_values: np.ndarray, boundary_value: float | None = 0.0
) -> ScalarField:
    """Assemble a ScalarField from a vector of inside-node values.

    ``boundary_value`` is written on the boundary nodes; pass None to leave
    the field defined on the inside set only.
    """
    values = np.full(mask.inside.shape, np.nan)
    values[mask.inside] = inside_values
    defined = mask.inside.copy()
    if boundary_value is not None:
        bnd = boundary_mask(mask)
        values[bnd] = boundary_value
        defined |= bnd
    return ScalarField(mask=mask, values=values, defined=defined)


def require_same_mask(a: ScalarField, b: ScalarField) -> None:
    if not a.mask.same_domain(b.mask):
        raise MaskMismatch("fields live on different masks")


def gradient(w: ScalarField, mask: BinaryMask, boundary_value: float = 0.0) -> VectorField:
    """Central-difference gradient on inside nodes.

    Neighbours that are boundary nodes contribute ``boundary_value`` (0 for
    distance-like fields, 1 for the screened-Poisson solution); thanks to the
    margin rule an inside node never has a neighbour outside the grid.
    """
    h = mask.spacing
    ins = mask.inside
    w_sub = np.where(ins, w.values, boundary_value)
    gx = (shifted(w_sub, 0, 1, boundary_value) - shifted(w_sub, 0, -1, boundary_value)) / (2 * h)
    gy = (shifted(w_sub, 1, 0, boundary_value) - shifted(w_sub, -1, 0, boundary_value)) / (2 * h)
    gx = np.where(ins, gx, 0.0)
    gy = np.where(ins, gy, 0.0)
    return VectorField(mask=mask, x=gx, y=gy)


def divergence(g: VectorField, mask: BinaryMask) -> ScalarField:
    """Central-difference divergence of a vector field on inside nodes.

    Components are treated as 0 on boundary nodes, matching the convention
    used by :func:`gradient`.
    """
    h = mask.spacing
    ins = mask.inside
    gx = np.where(ins, g.x, 0.0)
    gy = np.where(ins, g.y, 0.0)
    div = (shifted(gx, 0, 1, 0.0) - shifted(gx, 0, -1, 0.0)) / (2 * h) + (
        shifted(gy, 1, 0, 0.0) - shifted(gy, -1, 0, 0.0)
    ) / (2 * h)
    values = np.full(mask.inside.shape, np.nan)
    values[ins] = div[ins]
    return ScalarField(mask=mask, values=values, defined=ins.copy())

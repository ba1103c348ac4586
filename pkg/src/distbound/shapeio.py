"""Mask/field file formats and built-in analytic shape generators.

Formats are netpbm (PGM in, PPM out) plus a rectangular CSV grid for
fields, so artifacts stay dependency-free and bit-exact specifiable.
"""
from __future__ import annotations

import math
import re

import numpy as np

from .errors import DoesNotFit, ParseError
from .grid import BinaryMask, ScalarField, validate_mask

# ---------------------------------------------------------------------------
# PGM masks

def read_mask_pgm(data: bytes) -> BinaryMask:
    """Parse a P2 (ASCII) or P5 (binary) PGM into a validated mask.

    A pixel is inside iff its value is at least (maxval + 1) / 2.
    """
    if not data.startswith((b"P2", b"P5")):
        raise ParseError("not a P2/P5 PGM")
    binary = data.startswith(b"P5")
    header: list[int] = []
    pos = 2
    while len(header) < 3:
        m = re.compile(rb"\s*(?:#[^\n]*\n)*\s*(\d+)").match(data, pos)
        if m is None:
            raise ParseError("truncated PGM header")
        header.append(int(m.group(1)))
        pos = m.end()
    width, height, maxval = header
    if width <= 0 or height <= 0:
        raise ParseError(f"bad dimensions {width}x{height}")
    if not 0 < maxval <= 65535:
        raise ParseError(f"maxval {maxval} outside (0, 65535]")
    n = width * height
    if binary:
        pos += 1  # single whitespace byte after maxval
        wide = maxval > 255
        need = n * (2 if wide else 1)
        raster = data[pos : pos + need]
        if len(raster) < need:
            raise ParseError("truncated PGM raster")
        dtype = ">u2" if wide else np.uint8
        pixels = np.frombuffer(raster, dtype=dtype, count=n).astype(np.int64)
    else:
        tokens = data[pos:].split()
        if len(tokens) < n:
            raise ParseError("truncated PGM raster")
        try:
            pixels = np.array([int(t) for t in tokens[:n]], dtype=np.int64)
        except ValueError as exc:
            raise ParseError(f"non-numeric PGM token: {exc}") from None
    if pixels.max(initial=0) > maxval:
        raise ParseError("pixel value exceeds maxval")
    inside = (pixels >= (maxval + 1) // 2).reshape(height, width)
    mask = BinaryMask(inside=inside)
    validate_mask(mask)
    return mask


def write_mask_pgm(mask: BinaryMask, binary: bool = True) -> bytes:
    """Encode a mask as PGM (255 inside, 0 outside)."""
    h, w = mask.inside.shape
    header = f"P{'5' if binary else '2'}\n{w} {h}\n255\n".encode()
    pixels = np.where(mask.inside, 255, 0).astype(np.uint8)
    if binary:
        return header + pixels.tobytes()
    body = "\n".join(" ".join(str(int(p)) for p in row) for row in pixels)
    return header + body.encode() + b"\n"


# ---------------------------------------------------------------------------
# CSV field grids

def format_value(x: float) -> str:
    return "nan" if math.isnan(x) else format(x, ".9g")


def write_field_csv(fld: ScalarField) -> bytes:
    """Header line "width height", then one comma-separated line per row.

    Undefined nodes are written as the literal token "nan".
    """
    h, w = fld.values.shape
    values = np.where(fld.defined, fld.values, np.nan)
    lines = [f"{w} {h}"]
    for r in range(h):
        lines.append(",".join(format_value(v) for v in values[r]))
    return ("\n".join(lines) + "\n").encode()


def read_field_csv(data: bytes) -> np.ndarray:
    """Parse a field CSV back into a float array (NaN at undefined nodes)."""
    lines = data.decode().splitlines()
    if not lines:
        raise ParseError("empty field file")
    try:
        w, h = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise ParseError(f"bad field header: {lines[0]!r}") from None
    if len(lines) < 1 + h:
        raise ParseError("truncated field file")
    out = np.empty((h, w))
    for r in range(h):
        cells = lines[1 + r].split(",")
        if len(cells) != w:
            raise ParseError(f"row {r} has {len(cells)} cells, expected {w}")
        try:
            out[r] = [float(c) for c in cells]
        except ValueError as exc:
            raise ParseError(f"bad cell in row {r}: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# PPM heatmaps

def write_heatmap_ppm(fld: ScalarField, scale_max: float | None = None) -> bytes:
    """P6 heatmap: 0 -> blue, scale_max/2 -> green, >= scale_max -> red.

    Undefined nodes render black. ``scale_max`` defaults to the field
    maximum (or 1 when the field is non-positive).
    """
    values = np.where(fld.defined, fld.values, np.nan)
    if scale_max is None:
        finite = values[np.isfinite(values)]
        top = float(finite.max()) if finite.size else 0.0
        scale_max = top if top > 0 else 1.0
    if scale_max <= 0:
        raise ValueError(f"scale_max must be positive, got {scale_max}")
    h, w = values.shape
    t = np.clip(np.nan_to_num(values / scale_max, nan=0.0), 0.0, 1.0)
    rgb = np.zeros((h, w, 3))
    lower = t <= 0.5
    rgb[..., 1] = np.where(lower, 2 * t, 2 - 2 * t)
    rgb[..., 2] = np.where(lower, 1 - 2 * t, 0.0)
    rgb[..., 0] = np.where(lower, 0.0, 2 * t - 1)
    img = np.rint(255 * rgb).astype(np.uint8)
    img[~fld.defined] = 0
    return f"P6\n{w} {h}\n255\n".encode() + img.tobytes()


# ---------------------------------------------------------------------------
# Built-in shapes

def make_shape(kind: str, canvas: tuple[int, int], **params) -> BinaryMask:
    """Analytic shape rasterised by its node-centre inclusion predicate.

    ``canvas`` is (width, height). Supported kinds: disk(r), strip(width),
    rectangle(w, h), annulus(r_in, r_out), lshape(w, h, cut_w, cut_h).
    """
    w, h = canvas
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    x = np.arange(w)[None, :]
    y = np.arange(h)[:, None]
    if kind == "disk":
        r = float(params["r"])
        inside = (x - cx) ** 2 + (y - cy) ** 2 <= r * r
    elif kind == "annulus":
        r_in, r_out = float(params["r_in"]), float(params["r_out"])
        d2 = (x - cx) ** 2 + (y - cy) ** 2
        inside = (d2 >= r_in * r_in) & (d2 <= r_out * r_out)
    elif kind == "strip":
        rows = int(params["width"])
        y0 = (h - rows) // 2
        inside = (y >= y0) & (y < y0 + rows) & (x >= 1) & (x <= w - 2)
    elif kind == "rectangle":
        rw, rh = int(params["w"]), int(params["h"])
        x0, y0 = (w - rw) // 2, (h - rh) // 2
        inside = (x >= x0) & (x < x0 + rw) & (y >= y0) & (y < y0 + rh)
    elif kind == "lshape":
        rw, rh = int(params["w"]), int(params["h"])
        cut_w, cut_h = int(params["cut_w"]), int(params["cut_h"])
        x0, y0 = (w - rw) // 2, (h - rh) // 2
        outer = (x >= x0) & (x < x0 + rw) & (y >= y0) & (y < y0 + rh)
        cut = (x >= x0 + rw - cut_w) & (y < y0 + cut_h)
        inside = outer & ~cut
    else:
        raise DoesNotFit(f"unknown shape kind {kind!r}")
    inside = np.broadcast_to(inside, (h, w)).copy()
    if not inside.any():
        raise DoesNotFit(f"{kind} shape produced no inside node on canvas {w}x{h}")
    if inside[0, :].any() or inside[-1, :].any() or inside[:, 0].any() or inside[:, -1].any():
        raise DoesNotFit(f"{kind} shape does not keep a one-pixel margin on canvas {w}x{h}")
    mask = BinaryMask(inside=inside)
    validate_mask(mask)
    return mask


_SHAPE_KEYS = {
    "disk": {"r"},
    "strip": {"width"},
    "rectangle": {"w", "h"},
    "annulus": {"r_in", "r_out"},
    "lshape": {"w", "h", "cut_w", "cut_h"},
}


def parse_shape_spec(spec: str) -> BinaryMask:
    """Build a mask from a compact spec string, e.g. ``disk:r=20,canvas=64``.

    ``canvas`` takes WxH or a single size for a square canvas.
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip()
    if kind not in _SHAPE_KEYS:
        raise ParseError(f"unknown shape kind {kind!r} in spec {spec!r}")
    params: dict[str, str] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ParseError(f"bad shape parameter {item!r} in spec {spec!r}")
        params[key.strip()] = val.strip()
    if "canvas" not in params:
        raise ParseError(f"shape spec {spec!r} needs canvas=WxH")
    canvas_str = params.pop("canvas").lower()
    try:
        if "x" in canvas_str:
            cw, ch = (int(p) for p in canvas_str.split("x"))
        else:
            cw = ch = int(canvas_str)
    except ValueError:
        raise ParseError(f"bad canvas {canvas_str!r} in spec {spec!r}") from None
    expected = _SHAPE_KEYS[kind]
    if set(params) != expected:
        raise ParseError(
            f"shape {kind!r} needs parameters {sorted(expected)}, got {sorted(params)}"
        )
    try:
        numeric = {k: float(v) for k, v in params.items()}
    except ValueError:
        raise ParseError(f"non-numeric shape parameter in spec {spec!r}") from None
    return make_shape(kind, (cw, ch), **numeric)

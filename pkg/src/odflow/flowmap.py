"""Deterministic flow-map rendering to SVG and GeoJSON.

Flows are straight segments between zone centroids on a plate carree
projection, classed into equal-interval magnitude bands that drive stroke
width and brightness.  Larger flows are emitted first so that smaller ones
paint on top; opposing flows of a zone pair are offset sideways so they do
not fully overlap.  Output is byte-deterministic: fixed element order and
fixed 3-decimal number formatting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, ContractError, ValidationError
from .gravity import ODMatrix, round_half_away
from .io import ZonesLike, zone_list

N_NODE_CLASSES = 5

DEFAULT_FLOW_COLORS = ("#08306b", "#2171b5", "#4292c6", "#6baed6", "#c6dbef")
DEFAULT_WIDTHS = (0.6, 1.2, 2.2, 3.4, 5.0)
DEFAULT_NODE_RADII = (3.0, 5.0, 7.5, 10.5, 14.0)

#: Sideways shift (px) applied to each member of a bidirectional pair.
PAIR_OFFSET_PX = 1.0


@dataclass(frozen=True)
class RenderSpec:
    """Visual-encoding parameters for the flow map.

    ``breaks`` are the ascending class boundaries (``None`` derives equal
    intervals from the rendered matrix); there must be one color and one
    width per class, i.e. ``len(breaks) + 1`` of each.  Node circles use
    five radii against five ascending total-volume boundaries (upper
    bounds; ``None`` derives them from the data).
    """

    breaks: tuple[float, ...] | None = None
    min_flow: float = 0.0
    flow_colors: tuple[str, ...] = DEFAULT_FLOW_COLORS
    widths: tuple[float, ...] = DEFAULT_WIDTHS
    node_radii: tuple[float, ...] = DEFAULT_NODE_RADII
    node_breaks: tuple[float, ...] | None = None
    canvas_width: int = 900
    canvas_height: int = 700
    padding: float = 0.08

    def __post_init__(self):
        if self.breaks is not None:
            object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))
            _check_ascending(self.breaks, "breaks")
            if len(self.flow_colors) != len(self.breaks) + 1:
                raise ConfigurationError(
                    f"{len(self.breaks)} breaks need {len(self.breaks) + 1} colors, "
                    f"got {len(self.flow_colors)}"
                )
        if len(self.widths) != len(self.flow_colors):
            raise ConfigurationError("one stroke width per class is required")
        if len(self.node_radii) != N_NODE_CLASSES:
            raise ConfigurationError(f"exactly {N_NODE_CLASSES} node radii are required")
        if self.node_breaks is not None:
            object.__setattr__(self, "node_breaks", tuple(float(b) for b in self.node_breaks))
            _check_ascending(self.node_breaks, "node_breaks")
            if len(self.node_breaks) != N_NODE_CLASSES:
                raise ConfigurationError(f"exactly {N_NODE_CLASSES} node boundaries are required")
        if self.min_flow < 0:
            raise ValidationError("min_flow must be >= 0")
        if not 0.0 <= self.padding < 0.5:
            raise ValidationError("padding must be in [0, 0.5)")

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def _check_ascending(values: Sequence[float], what: str) -> None:
    for a, b in zip(values, values[1:]):
        if not a < b:
            raise ConfigurationError(f"{what} must be strictly ascending, got {tuple(values)}")


def classify_flows(
    values: Sequence[float] | np.ndarray,
    breaks: Sequence[float],
    min_flow: float = 0.0,
) -> np.ndarray:
    """Class index per value: the count of breaks <= value.

    A value equal to a boundary belongs to the upper class; values below
    ``min_flow`` get class -1 (hidden).
    """
    breaks = tuple(float(b) for b in breaks)
    _check_ascending(breaks, "breaks")
    arr = np.asarray(values, dtype=float)
    classes = np.searchsorted(breaks, arr, side="right").astype(int)
    classes[arr < min_flow] = -1
    return classes


def default_breaks(without: ODMatrix, with_: ODMatrix, k: int = 5) -> tuple[float, ...]:
    """k-1 equal-interval boundaries over both scenarios' positive cells.

    Using the union of both matrices gives the two maps one shared legend.
    """
    if k < 2:
        raise ConfigurationError(f"need at least 2 classes, got k={k}")
    top = max(float(without.values.max()), float(with_.values.max()))
    if top <= 0:
        raise ConfigurationError("cannot derive breaks: no positive cells in either matrix")
    return tuple(top * i / k for i in range(1, k))


def node_classes(totals: np.ndarray, node_breaks: Sequence[float] | None) -> np.ndarray:
    """Five-class index per zone total (upper-bound boundaries, clamped at the top)."""
    totals = np.asarray(totals, dtype=float)
    if node_breaks is None:
        top = float(totals.max()) if totals.size else 0.0
        if top <= 0:
            return np.zeros(totals.shape, dtype=int)
        node_breaks = tuple(top * (i + 1) / N_NODE_CLASSES for i in range(N_NODE_CLASSES))
    bounds = np.asarray(node_breaks, dtype=float)
    idx = np.searchsorted(bounds, totals, side="left")
    return np.minimum(idx, N_NODE_CLASSES - 1).astype(int)


def _fmt(x: float) -> str:
    return f"{x:.3f}"


class _Projection:
    """Plate carree fit of the zone bounding box into the padded canvas."""

    def __init__(self, lats, lons, width: int, height: int, padding: float):
        lat_min, lat_max = min(lats), max(lats)
        lon_min, lon_max = min(lons), max(lons)
        inner_w = width * (1.0 - 2.0 * padding)
        inner_h = height * (1.0 - 2.0 * padding)
        span_lon = lon_max - lon_min
        span_lat = lat_max - lat_min
        if span_lon > 0 or span_lat > 0:
            scale = min(
                inner_w / span_lon if span_lon > 0 else float("inf"),
                inner_h / span_lat if span_lat > 0 else float("inf"),
            )
        else:
            scale = 0.0
        self._scale = scale
        self._lon0 = (lon_min + lon_max) / 2.0
        self._lat0 = (lat_min + lat_max) / 2.0
        self._cx = width / 2.0
        self._cy = height / 2.0

    def xy(self, lat: float, lon: float) -> tuple[float, float]:
        return (
            self._cx + (lon - self._lon0) * self._scale,
            self._cy - (lat - self._lat0) * self._scale,
        )


def _visible_flows(m: ODMatrix, min_flow: float) -> list[tuple[int, int, float]]:
    """Positive off-diagonal cells with rounded magnitude >= min_flow.

    Zero cells are not flows, so they stay invisible even at min_flow 0.
    """
    rounded = round_half_away(m.values)
    n = m.n_zones
    return [
        (i, j, float(rounded[i, j]))
        for i in range(n)
        for j in range(n)
        if i != j and rounded[i, j] > 0 and rounded[i, j] >= min_flow
    ]


def _resolve_breaks(m: ODMatrix, spec_breaks, n_classes: int) -> tuple[float, ...]:
    if spec_breaks is not None:
        return tuple(spec_breaks)
    if float(m.values.max()) <= 0:
        # Degenerate all-zero matrix: any ascending placeholder keeps output valid.
        return tuple(float(i) for i in range(1, n_classes))
    return default_breaks(m, m, n_classes)


def _check_zones(m: ODMatrix, zs) -> None:
    if m.zone_codes != tuple(z.code for z in zs):
        raise ContractError("zone table does not match the matrix ordering")


def render_svg(m: ODMatrix, zones: ZonesLike, spec: RenderSpec | None = None) -> str:
    """Flow map as a standalone SVG 1.1 document (text).

    Intra-zonal flows are not drawn; node circles encode each zone's total
    attracted volume in five size classes; the legend lists the flow class
    intervals shared by any map rendered with the same breaks.
    """
    spec = spec or RenderSpec()
    zs = zone_list(zones)
    _check_zones(m, zs)
    for z in zs:
        if z.coord is None:
            raise ValidationError(f"zone {z.code} has no coordinate")

    breaks = _resolve_breaks(m, spec.breaks, len(spec.flow_colors))
    if len(spec.flow_colors) != len(breaks) + 1:
        raise ConfigurationError(
            f"{len(breaks)} breaks need {len(breaks) + 1} colors, got {len(spec.flow_colors)}"
        )
    proj = _Projection(
        [z.coord.lat for z in zs], [z.coord.lon for z in zs],
        spec.canvas_width, spec.canvas_height, spec.padding,
    )
    pts = [proj.xy(z.coord.lat, z.coord.lon) for z in zs]

    flows = _visible_flows(m, spec.min_flow)
    # Descending magnitude, ties by (origin, dest): smaller flows paint on top.
    flows.sort(key=lambda f: (-f[2], f[0], f[1]))
    visible_pairs = {(i, j) for i, j, _ in flows}
    magnitudes = np.array([f[2] for f in flows], dtype=float)
    classes = (
        classify_flows(magnitudes, breaks, spec.min_flow) if flows else np.array([], dtype=int)
    )

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.canvas_width}" '
        f'height="{spec.canvas_height}" '
        f'viewBox="0 0 {spec.canvas_width} {spec.canvas_height}">',
        f'<rect x="0" y="0" width="{spec.canvas_width}" height="{spec.canvas_height}" fill="#ffffff"/>',
        '<g id="flows" stroke-linecap="round" fill="none">',
    ]
    for (i, j, magnitude), cls in zip(flows, classes):
        (x1, y1), (x2, y2) = pts[i], pts[j]
        if (j, i) in visible_pairs:
            dx, dy = x2 - x1, y2 - y1
            norm = (dx * dx + dy * dy) ** 0.5
            if norm > 0:
                ox, oy = -dy / norm * PAIR_OFFSET_PX, dx / norm * PAIR_OFFSET_PX
                x1, y1, x2, y2 = x1 + ox, y1 + oy, x2 + ox, y2 + oy
        # data-trips keeps magnitudes readable off the document itself.
        out.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{spec.flow_colors[cls]}" stroke-width="{_fmt(spec.widths[cls])}" '
            f'data-trips="{int(magnitude)}"/>'
        )
    out.append("</g>")

    attracted = round_half_away(m.values).sum(axis=0)
    n_cls = node_classes(attracted, spec.node_breaks)
    out.append('<g id="nodes" fill="#636363" fill-opacity="0.6" stroke="#252525" stroke-width="0.5">')
    for (x, y), cls in zip(pts, n_cls):
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(spec.node_radii[cls])}"/>')
    out.append("</g>")

    out.append('<g id="legend" font-family="sans-serif" font-size="11" fill="#000000">')
    out.append('<text x="12" y="18" font-weight="bold">Trips per year</text>')
    lows = [max(spec.min_flow, 0.0), *breaks]
    for cls in range(len(spec.flow_colors)):
        y = 34 + 16 * cls
        if cls < len(breaks):
            label = f"{_fmt(lows[cls])} - {_fmt(breaks[cls])}"
        else:
            label = f">= {_fmt(breaks[-1])}"
        out.append(
            f'<line x1="12" y1="{y - 4}" x2="44" y2="{y - 4}" '
            f'stroke="{spec.flow_colors[cls]}" stroke-width="{_fmt(spec.widths[cls])}"/>'
        )
        out.append(f'<text x="50" y="{y}">{label}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_geojson(
    m: ODMatrix,
    zones: ZonesLike,
    min_flow: float = 0.0,
    breaks: Sequence[float] | None = None,
) -> str:
    """GeoJSON FeatureCollection (text): LineString per visible inter-zonal flow,
    Point per zone.

    Flow properties: origin, dest, trips (rounded), class.  Point properties:
    code, name, total_in, total_out (rounded).
    """
    zs = zone_list(zones)
    _check_zones(m, zs)
    resolved = _resolve_breaks(m, tuple(breaks) if breaks is not None else None, 5)

    features = []
    flows = _visible_flows(m, min_flow)
    magnitudes = np.array([f[2] for f in flows], dtype=float)
    classes = (
        classify_flows(magnitudes, resolved, min_flow) if flows else np.array([], dtype=int)
    )
    for (i, j, magnitude), cls in zip(flows, classes):
        zi, zj = zs[i], zs[j]
        features.append({
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": [
                    [zi.coord.lon, zi.coord.lat],
                    [zj.coord.lon, zj.coord.lat],
                ],
            },
            "properties": {
                "origin": zi.code,
                "dest": zj.code,
                "trips": int(magnitude),
                "class": int(cls),
            },
        })

    rounded = round_half_away(m.values)
    total_in = rounded.sum(axis=0)
    total_out = rounded.sum(axis=1)
    for idx, z in enumerate(zs):
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [z.coord.lon, z.coord.lat]},
            "properties": {
                "code": z.code,
                "name": z.name,
                "total_in": int(total_in[idx]),
                "total_out": int(total_out[idx]),
            },
        })
    return json.dumps({"type": "FeatureCollection", "features": features}, indent=2) + "\n"

"""File formats: zone tables, OD matrices and flow-interchange exports.

All CSV output uses a fixed dialect (comma separator, ``.`` decimal point,
LF line endings, no quoting) so that identical inputs give byte-identical
files.  The OD layout mirrors the tabular convention with a literal ``O\\D``
corner cell, zone codes on both axes and integer cells.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence, Union

import numpy as np

from .demand import PURPOSES, Zone
from .errors import ContractError, ParseError, ValidationError
from .geo import Coordinate, parse_dm
from .gravity import ODMatrix, round_half_away

OD_CORNER = "O\\D"

#: Zone CSV columns, in order.  ``pop_total`` may replace the sex pair.
ZONE_COLUMNS = (
    "code", "name", "country", "subregion", "lat", "lon",
    "pop_female", "pop_male",
    "kindergarten", "primary_school", "secondary_school", "hospital", "market",
)


@dataclass
class ZoneTable:
    """Ordered zone roster as read from file; order defines matrix orientation."""

    zones: list[Zone]
    source_path: str = ""
    warnings: list[str] = field(default_factory=list)

    def __iter__(self) -> Iterator[Zone]:
        return iter(self.zones)

    def __len__(self) -> int:
        return len(self.zones)

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(z.code for z in self.zones)


ZonesLike = Union[ZoneTable, Sequence[Zone]]


def zone_list(zones: ZonesLike) -> list[Zone]:
    """Normalise a ZoneTable or plain sequence to a list of zones."""
    if isinstance(zones, ZoneTable):
        return list(zones.zones)
    return list(zones)


def _parse_count(text: str, column: str, row: int) -> int:
    try:
        value = int(text.strip())
    except ValueError:
        raise ValidationError(
            f"row {row}: column {column!r} must be an integer, got {text!r}"
        ) from None
    if value < 0:
        raise ValidationError(f"row {row}: column {column!r} is negative ({value})")
    return value


def load_zones(
    path: Union[str, Path], female_share_default: float = 0.5
) -> ZoneTable:
    """Read a zone table CSV.

    Expects the columns of :data:`ZONE_COLUMNS`; ``pop_total`` is accepted in
    place of the ``pop_female``/``pop_male`` pair and split by
    ``female_share_default`` with a warning per row.  Coordinates may be
    decimal degrees or degrees-decimal-minutes strings.  Row numbers in error
    messages count the header as row 1.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty file")

    header = [h.strip() for h in rows[0]]
    warnings: list[str] = []
    use_total = "pop_total" in header
    if use_total and ("pop_female" in header or "pop_male" in header):
        raise ValidationError(
            "ambiguous population columns: give pop_female/pop_male or pop_total, not both"
        )
    required = [c for c in ZONE_COLUMNS if not (use_total and c.startswith("pop_"))]
    if use_total:
        required.append("pop_total")
    missing = [c for c in required if c not in header]
    if missing:
        raise ValidationError(f"missing required column(s): {', '.join(missing)}")
    for col in header:
        if col not in required:
            warnings.append(f"ignoring unknown column {col!r}")
    col = {name: header.index(name) for name in required}

    zones: list[Zone] = []
    seen: dict[str, int] = {}
    for idx, raw in enumerate(rows[1:], start=2):
        if not raw or all(not c.strip() for c in raw):
            continue
        if len(raw) < len(header):
            raise ValidationError(f"row {idx}: expected {len(header)} cells, got {len(raw)}")
        cell = lambda name: raw[col[name]].strip()

        code = cell("code")
        if not code:
            raise ValidationError(f"row {idx}: empty zone code")
        if code in seen:
            raise ValidationError(
                f"row {idx}: duplicate zone code {code!r} (first seen at row {seen[code]})"
            )
        seen[code] = idx

        try:
            coord = Coordinate(lat=parse_dm(cell("lat")), lon=parse_dm(cell("lon")))
        except (ParseError, ValidationError) as exc:
            raise ValidationError(f"row {idx}: {exc}") from None

        if use_total:
            total = _parse_count(cell("pop_total"), "pop_total", idx)
            pop_f = int(total * female_share_default + 0.5)  # half rounds up
            pop_m = total - pop_f
            warnings.append(
                f"row {idx}: split pop_total={total} as "
                f"{pop_f} female / {pop_m} male (share {female_share_default})"
            )
        else:
            pop_f = _parse_count(cell("pop_female"), "pop_female", idx)
            pop_m = _parse_count(cell("pop_male"), "pop_male", idx)

        facilities = {p: _parse_count(cell(p), p, idx) for p in PURPOSES}
        zones.append(
            Zone(
                code=code,
                name=cell("name"),
                country=cell("country"),
                subregion=cell("subregion"),
                coord=coord,
                pop_female=pop_f,
                pop_male=pop_m,
                facilities=facilities,
            )
        )
    return ZoneTable(zones=zones, source_path=str(path), warnings=warnings)


def od_csv_text(m: ODMatrix) -> str:
    """OD matrix as CSV text: ``O\\D`` corner, codes on both axes, integer cells."""
    rounded = round_half_away(m.values)
    lines = [",".join([OD_CORNER, *m.zone_codes])]
    for i, code in enumerate(m.zone_codes):
        cells = (str(int(v)) for v in rounded[i])
        lines.append(",".join([code, *cells]))
    return "\n".join(lines) + "\n"


def write_od_csv(m: ODMatrix, path: Union[str, Path]) -> None:
    Path(path).write_text(od_csv_text(m), encoding="utf-8", newline="")


def read_od_csv(
    path: Union[str, Path], purpose: str = "aggregate", scenario: str = ""
) -> ODMatrix:
    """Read a matrix written by :func:`write_od_csv`; exact inverse on integers."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if header[0] != OD_CORNER:
        raise ParseError(f"{path}: top-left cell must be {OD_CORNER!r}, got {header[0]!r}")
    codes = header[1:]
    n = len(codes)
    body = rows[1:]
    if len(body) != n:
        raise ParseError(f"{path}: non-square body ({len(body)} rows for {n} columns)")
    values = np.zeros((n, n), dtype=float)
    for i, raw in enumerate(body, start=2):
        row_code = raw[0].strip()
        if row_code not in codes:
            raise ParseError(f"{path}: row {i}: unknown code {row_code!r}")
        if row_code != codes[i - 2]:
            raise ParseError(
                f"{path}: row {i}: code {row_code!r} out of order (expected {codes[i - 2]!r})"
            )
        if len(raw) != n + 1:
            raise ParseError(f"{path}: row {i}: expected {n + 1} cells, got {len(raw)}")
        for j, cell in enumerate(raw[1:]):
            try:
                values[i - 2, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: row {i}, column {j + 2}: non-numeric cell {cell!r}"
                ) from None
    return ODMatrix(zone_codes=tuple(codes), purpose=purpose, scenario=scenario, values=values)


def export_flow_interchange(
    m: ODMatrix, zones: ZonesLike, min_flow: float = 0.0
) -> tuple[str, str]:
    """Node and flow CSV documents for flow-mapping tools.

    Nodes: ``Code,Name,Lat,Lon`` for every zone.  Flows: ``Origin,Dest,Magnitude``
    for every positive cell (intra-zonal included) whose rounded magnitude is
    at least ``min_flow``, in origin-major order.
    """
    if min_flow < 0:
        raise ValidationError(f"min_flow must be >= 0, got {min_flow!r}")
    zs = zone_list(zones)
    if m.zone_codes != tuple(z.code for z in zs):
        raise ContractError("zone table does not match the matrix ordering")

    node_lines = ["Code,Name,Lat,Lon"]
    for z in zs:
        node_lines.append(f"{z.code},{z.name},{z.coord.lat},{z.coord.lon}")

    rounded = round_half_away(m.values)
    flow_lines = ["Origin,Dest,Magnitude"]
    for i, origin in enumerate(m.zone_codes):
        for j, dest in enumerate(m.zone_codes):
            magnitude = rounded[i, j]
            if magnitude > 0 and magnitude >= min_flow:
                flow_lines.append(f"{origin},{dest},{int(magnitude)}")
    return "\n".join(node_lines) + "\n", "\n".join(flow_lines) + "\n"

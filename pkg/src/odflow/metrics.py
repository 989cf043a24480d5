"""Scenario analytics over OD matrices.

Totals, between-scenario deltas, the cross-border trip share and the
directional (west/east, north/south) split of inter-zonal movement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .demand import Zone
from .errors import ConfigurationError, ContractError
from .gravity import ODMatrix

#: Coordinate differences smaller than this (degrees) count as "no movement"
#: on that axis when classifying flow direction.
DIRECTION_DEAD_BAND_DEG = 1e-9


@dataclass(frozen=True, eq=False)
class ScenarioComparison:
    """Headline comparison between a without- and a with-link scenario."""

    total_without: float
    total_with: float
    delta: float
    increase_vs_without: float
    increase_vs_with: float
    per_zone_row_deltas: np.ndarray


def total_trips(m: ODMatrix) -> float:
    """Sum of every cell, diagonal included."""
    return float(m.values.sum())


def scenario_delta(without: ODMatrix, with_: ODMatrix) -> ScenarioComparison:
    """Compare two scenarios over the same zone roster.

    ``increase_vs_without`` is delta over the without-total,
    ``increase_vs_with`` delta over the with-total; both are 0 when the
    corresponding total is 0.
    """
    if without.zone_codes != with_.zone_codes:
        raise ContractError("scenario_delta: zone orderings differ")
    t_without = total_trips(without)
    t_with = total_trips(with_)
    delta = t_with - t_without
    return ScenarioComparison(
        total_without=t_without,
        total_with=t_with,
        delta=delta,
        increase_vs_without=delta / t_without if t_without else 0.0,
        increase_vs_with=delta / t_with if t_with else 0.0,
        per_zone_row_deltas=with_.values.sum(axis=1) - without.values.sum(axis=1),
    )


def _check_roster(m: ODMatrix, zones: Sequence[Zone]) -> None:
    if m.zone_codes != tuple(z.code for z in zones):
        raise ContractError("zone table does not match the matrix ordering")


def cross_border_share(
    m: ODMatrix, zones: Sequence[Zone], include_intra: bool = True
) -> float:
    """Share of trips whose origin and destination lie in different countries.

    The denominator includes intra-zonal trips by default (set
    ``include_intra=False`` to restrict it to inter-zonal movement).
    """
    _check_roster(m, zones)
    for z in zones:
        if not z.country:
            raise ConfigurationError(f"zone {z.code} has no country label")
    countries = [z.country for z in zones]
    cross = np.array([[ci != cj for cj in countries] for ci in countries], dtype=bool)
    numerator = float(m.values[cross].sum())
    if include_intra:
        denominator = float(m.values.sum())
    else:
        off = ~np.eye(m.n_zones, dtype=bool)
        denominator = float(m.values[off].sum())
    return numerator / denominator if denominator else 0.0


def directional_shares(m: ODMatrix, zones: Sequence[Zone]) -> dict[str, float]:
    """Directional split of inter-zonal trips along each compass axis.

    Every off-diagonal cell is classified by the sign of the destination
    minus origin longitude (E-W axis) and latitude (N-S axis), with a small
    dead band treated as "no component".  Each axis's two shares are taken
    over the trips that do have a component on that axis, so they sum to 1
    whenever such trips exist.
    """
    _check_roster(m, zones)
    lats = np.array([z.coord.lat for z in zones])
    lons = np.array([z.coord.lon for z in zones])
    dlon = lons[np.newaxis, :] - lons[:, np.newaxis]  # dest minus origin
    dlat = lats[np.newaxis, :] - lats[:, np.newaxis]
    off = ~np.eye(len(zones), dtype=bool)

    we = float(m.values[off & (dlon > DIRECTION_DEAD_BAND_DEG)].sum())
    ew = float(m.values[off & (dlon < -DIRECTION_DEAD_BAND_DEG)].sum())
    ns = float(m.values[off & (dlat < -DIRECTION_DEAD_BAND_DEG)].sum())
    sn = float(m.values[off & (dlat > DIRECTION_DEAD_BAND_DEG)].sum())

    lon_total = we + ew
    lat_total = ns + sn
    return {
        "west_to_east": we / lon_total if lon_total else 0.0,
        "east_to_west": ew / lon_total if lon_total else 0.0,
        "north_to_south": ns / lat_total if lat_total else 0.0,
        "south_to_north": sn / lat_total if lat_total else 0.0,
    }

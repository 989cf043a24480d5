"""Coordinate handling and inter-zone distances.

Distances are great-circle (haversine) lengths in kilometres on a sphere of
mean radius 6371.0088 km.  Zone separations feed the gravity model's
impedance term, so the intra-zonal case needs a finite stand-in: half the
distance to the nearest other zone, floored to keep the inverse-power
friction factor finite for co-located zones.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigurationError, ParseError, ValidationError

EARTH_RADIUS_KM = 6371.0088

#: Smallest admissible zone separation (km); also the intra-zonal floor.
DEFAULT_MIN_DISTANCE_KM = 0.1

_DM_RE = re.compile(
    r"""^\s*(?P<deg>\d+(?:\.\d+)?)\s*[°d]\s*
        (?P<min>\d+(?:\.\d+)?)\s*['′m]?\s*
        (?P<hemi>[NSEWnsew])\s*$""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class Coordinate:
    """A WGS84 position in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValidationError(f"latitude {self.lat!r} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValidationError(f"longitude {self.lon!r} outside [-180, 180]")


def parse_dm(text: str) -> float:
    """Parse one angle written as degrees-decimal-minutes, e.g. ``13° 30.000' N``.

    Returns decimal degrees, signed by hemisphere (N/E positive, S/W
    negative).  A plain signed decimal-degree string passes through
    unchanged.  Raises :class:`ParseError` for malformed input and
    :class:`ValidationError` for minutes >= 60.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected a coordinate string, got {type(text).__name__}")
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty coordinate string")

    m = _DM_RE.match(stripped)
    if m is None:
        # Decimal-degree fallback.
        try:
            return float(stripped)
        except ValueError:
            raise ParseError(f"unparsable coordinate {stripped!r}") from None

    minutes = float(m.group("min"))
    if minutes >= 60.0:
        raise ValidationError(f"minutes {minutes!r} out of range in {stripped!r}")
    degrees = float(m.group("deg")) + minutes / 60.0
    if m.group("hemi").upper() in ("S", "W"):
        degrees = -degrees
    return degrees + 0.0  # normalise -0.0


def distance_km(a: Coordinate, b: Coordinate) -> float:
    """Haversine great-circle distance between two coordinates, in km.

    Exactly symmetric in its arguments and zero iff the coordinates are
    identical.
    """
    if a.lat == b.lat and a.lon == b.lon:
        return 0.0
    lat1, lon1 = math.radians(a.lat), math.radians(a.lon)
    lat2, lon2 = math.radians(b.lat), math.radians(b.lon)
    sin_dlat = math.sin((lat2 - lat1) / 2.0)
    sin_dlon = math.sin((lon2 - lon1) / 2.0)
    h = sin_dlat * sin_dlat + math.cos(lat1) * math.cos(lat2) * sin_dlon * sin_dlon
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def intra_zonal_distance(
    i: int,
    coords: Sequence[Coordinate],
    min_distance_km: float = DEFAULT_MIN_DISTANCE_KM,
) -> float:
    """Intra-zonal impedance distance for zone ``i``.

    Half the distance from zone ``i`` to its nearest distinct zone, floored
    at ``min_distance_km`` so co-located zones stay usable.
    """
    if len(coords) < 2:
        raise ConfigurationError("intra-zonal distance needs at least 2 zones")
    if not 0 <= i < len(coords):
        raise ConfigurationError(f"zone index {i} out of range for {len(coords)} zones")
    nearest = min(
        distance_km(coords[i], c) for j, c in enumerate(coords) if j != i
    )
    return max(nearest / 2.0, min_distance_km)

"""Impedance construction and production-constrained gravity distribution.

Trips from zone i to zone j follow

    Q_ij = P_i * A_j * F_ij / sum_x(A_x * F_ix),    F_ij = W_ij ** (-beta)

where W is the inter-zone distance matrix (intra-zonal distances on the
diagonal) and beta the distance-decay exponent.  The per-row normalisation
makes any proportionality constant cancel, so none is exposed.  Under the
barrier scenario F is zeroed for zone pairs in different subareas; rows left
with no reachable attraction distribute nothing and are reported as
stranded productions rather than silently dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from .demand import AttractionVector, ProductionVector, Zone
from .errors import ConfigurationError, ContractError, ValidationError
from .geo import DEFAULT_MIN_DISTANCE_KM, distance_km, intra_zonal_distance

#: Denominators below this are treated as unreachable (numeric underflow guard).
DENOMINATOR_FLOOR = 1e-300

#: Exponent search range used when calibrating.
DEFAULT_BETA_RANGE = (0.5, 3.0)

BARRIER = "barrier"
CONNECTED = "connected"


@dataclass(frozen=True)
class GravityConfig:
    """Distance-decay exponent and the impedance distance floor."""

    beta: float = 2.0
    min_distance_km: float = DEFAULT_MIN_DISTANCE_KM

    def __post_init__(self):
        if not self.beta > 0:
            raise ValidationError(f"beta must be > 0, got {self.beta!r}")
        if not self.min_distance_km > 0:
            raise ValidationError(f"min_distance_km must be > 0, got {self.min_distance_km!r}")

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class ScenarioSpec:
    """Connectivity rule: ``barrier`` confines trips to partition groups."""

    mode: str = CONNECTED
    partition_key: str = "subregion"

    def __post_init__(self):
        if self.mode not in (BARRIER, CONNECTED):
            raise ValidationError(f"scenario mode must be '{BARRIER}' or '{CONNECTED}', got {self.mode!r}")

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def partition_of(self, zone: Zone) -> str:
        value = getattr(zone, self.partition_key, "")
        if self.mode == BARRIER and not value:
            raise ConfigurationError(
                f"barrier scenario: zone {zone.code} has no {self.partition_key} value"
            )
        return value


@dataclass(frozen=True, eq=False)
class ImpedanceMatrix:
    """Friction factors F_ij = W_ij**(-beta); zero exactly on severed pairs."""

    zone_codes: tuple[str, ...]
    scenario: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        n = len(self.zone_codes)
        if self.values.shape != (n, n):
            raise ValidationError("impedance matrix shape does not match zone count")
        if np.any(self.values < 0):
            raise ValidationError("friction factors must be non-negative")


@dataclass(frozen=True, eq=False)
class ODMatrix:
    """Square yearly trip matrix, tagged with zone ordering, purpose and scenario.

    ``stranded`` lists (zone_code, lost_production) for rows that had no
    reachable attraction when the matrix was distributed.
    """

    zone_codes: tuple[str, ...]
    purpose: str
    scenario: str
    values: np.ndarray
    stranded: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zone_codes", tuple(self.zone_codes))
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        n = len(self.zone_codes)
        if values.shape != (n, n):
            raise ValidationError(
                f"OD matrix shape {values.shape} does not match {n} zone codes"
            )
        if len(set(self.zone_codes)) != n:
            raise ValidationError("zone codes must be unique")
        if np.any(values < 0):
            raise ValidationError("OD matrix cells must be non-negative")

    @property
    def n_zones(self) -> int:
        return len(self.zone_codes)

    def index_of(self, code: str) -> int:
        try:
            return self.zone_codes.index(code)
        except ValueError:
            raise KeyError(f"unknown zone code {code!r}") from None


def distance_and_mask(
    zones: Sequence[Zone],
    scenario: ScenarioSpec,
    min_distance_km: float = DEFAULT_MIN_DISTANCE_KM,
) -> tuple[np.ndarray, np.ndarray]:
    """Floored distance matrix W and the reachability mask for a scenario.

    Separating the beta-independent parts lets calibration re-evaluate the
    friction matrix cheaply.
    """
    if len(zones) < 2:
        raise ConfigurationError("impedance needs at least 2 zones")
    coords = [z.coord for z in zones]
    n = len(zones)
    w = np.empty((n, n), dtype=float)
    for i in range(n):
        w[i, i] = intra_zonal_distance(i, coords, min_distance_km)
        for j in range(i + 1, n):
            d = max(distance_km(coords[i], coords[j]), min_distance_km)
            w[i, j] = d
            w[j, i] = d
    if scenario.mode == BARRIER:
        parts = [scenario.partition_of(z) for z in zones]
        mask = np.array([[pi == pj for pj in parts] for pi in parts], dtype=float)
    else:
        mask = np.ones((n, n), dtype=float)
    return w, mask


def impedance_matrix(
    zones: Sequence[Zone], config: GravityConfig, scenario: ScenarioSpec
) -> ImpedanceMatrix:
    """Friction-factor matrix for the zones under one scenario."""
    w, mask = distance_and_mask(zones, scenario, config.min_distance_km)
    values = mask * w ** (-config.beta)
    return ImpedanceMatrix(
        zone_codes=tuple(z.code for z in zones),
        scenario=scenario.mode,
        values=values,
    )


def distribute(
    P: ProductionVector, A: AttractionVector, F: ImpedanceMatrix
) -> ODMatrix:
    """Production-constrained distribution of P over destinations weighted by A*F.

    Rows whose reachable attraction sums to (numerically) zero produce no
    trips; they are recorded on the result's ``stranded`` list with the
    production they lost.
    """
    if P.purpose != A.purpose:
        raise ContractError(
            f"production purpose {P.purpose!r} does not match attraction purpose {A.purpose!r}"
        )
    n = len(F.zone_codes)
    if P.values.shape != (n,) or A.values.shape != (n,):
        raise ContractError(
            f"dimension mismatch: {n} zones vs P{P.values.shape}, A{A.values.shape}"
        )
    weights = A.values[np.newaxis, :] * F.values  # row i: A_x * F_ix over x
    denom = weights.sum(axis=1)
    reachable = denom >= DENOMINATOR_FLOOR
    q = np.zeros((n, n), dtype=float)
    if np.any(reachable):
        q[reachable] = (
            P.values[reachable, np.newaxis]
            * weights[reachable]
            / denom[reachable, np.newaxis]
        )
    stranded = tuple(
        (F.zone_codes[i], float(P.values[i])) for i in range(n) if not reachable[i]
    )
    return ODMatrix(
        zone_codes=F.zone_codes,
        purpose=P.purpose,
        scenario=F.scenario,
        values=q,
        stranded=stranded,
    )


def aggregate(per_purpose: Sequence[ODMatrix]) -> ODMatrix:
    """Elementwise sum of per-purpose matrices sharing ordering and scenario."""
    if not per_purpose:
        raise ContractError("aggregate needs at least one matrix")
    first = per_purpose[0]
    for m in per_purpose[1:]:
        if m.zone_codes != first.zone_codes:
            raise ContractError("aggregate: zone orderings differ")
        if m.scenario != first.scenario:
            raise ContractError(
                f"aggregate: scenario mismatch ({m.scenario!r} vs {first.scenario!r})"
            )
    total = np.zeros_like(first.values)
    lost: dict[str, float] = {}
    for m in per_purpose:
        total = total + m.values
        for code, p in m.stranded:
            lost[code] = lost.get(code, 0.0) + p
    stranded = tuple((c, lost[c]) for c in first.zone_codes if c in lost)
    return ODMatrix(
        zone_codes=first.zone_codes,
        purpose="aggregate",
        scenario=first.scenario,
        values=total,
        stranded=stranded,
    )


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Round half away from zero, cellwise (the output rounding rule)."""
    arr = np.asarray(values, dtype=float)
    return np.copysign(np.floor(np.abs(arr) + 0.5), arr)


def round_matrix(m: ODMatrix) -> ODMatrix:
    """Integer version of an OD matrix for printing; the pipeline stays real-valued."""
    return ODMatrix(
        zone_codes=m.zone_codes,
        purpose=m.purpose,
        scenario=m.scenario,
        values=round_half_away(m.values),
        stranded=m.stranded,
    )

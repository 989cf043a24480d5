"""Trip production per purpose from zone demographics, and attraction weights.

Yearly productions are deterministic functions of zone population:

* schools: per-sex schooling-age shares times the number of school days,
* hospitals: pregnancy visits + under-five check-ups + tuberculosis care,
* markets: a fixed share of the population times the number of market days.

Attraction is facility-count based: each purpose's weight in a zone is that
zone's facility count divided by the study-area total, so weights sum to 1
whenever the purpose exists anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .geo import Coordinate

#: Purpose tags, in canonical order.  School production levels map onto the
#: first three; facility columns in zone tables use the same names.
PURPOSES = ("kindergarten", "primary_school", "secondary_school", "hospital", "market")

SCHOOL_LEVELS = {
    "kindergarten": "kindergarten",
    "primary": "primary_school",
    "secondary": "secondary_school",
}


@dataclass(frozen=True)
class Zone:
    """A settlement treated as one model zone."""

    code: str
    name: str
    country: str
    subregion: str
    coord: Coordinate
    pop_female: int
    pop_male: int
    facilities: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.code:
            raise ValidationError("zone code must be non-empty")
        if self.pop_female < 0 or self.pop_male < 0:
            raise ValidationError(f"zone {self.code}: negative population")
        for purpose, count in self.facilities.items():
            if purpose not in PURPOSES:
                raise ValidationError(f"zone {self.code}: unknown facility purpose {purpose!r}")
            if int(count) != count or count < 0:
                raise ValidationError(
                    f"zone {self.code}: facility count for {purpose} must be a non-negative integer"
                )

    @property
    def pop_total(self) -> int:
        return self.pop_female + self.pop_male

    def facility_count(self, purpose: str) -> int:
        return int(self.facilities.get(purpose, 0))


@dataclass(frozen=True)
class DemographicRates:
    """Production coefficients with the study-area defaults.

    School rates are fractions of the female/male population in the matching
    age band; hospital terms combine yearly pregnancy care, under-five
    check-ups and tuberculosis attendance; market trips are made by a fixed
    population share on each market day.
    """

    kindergarten_f: float = 0.085
    kindergarten_m: float = 0.087
    primary_f: float = 0.071
    primary_m: float = 0.073
    secondary_f: float = 0.112
    secondary_m: float = 0.115
    school_days: int = 200
    pregnancy_rate: float = 0.0378
    visits_per_pregnancy: float = 4.0
    pregnancy_attendance: float = 0.5
    skilled_birth_share: float = 0.51
    under5_share: float = 0.172
    child_visit_coverage: float = 0.84
    tb_rate: float = 0.0014
    tb_attendance: float = 0.84
    market_share: float = 0.25
    market_days: int = 52

    _RATE_FIELDS = (
        "kindergarten_f", "kindergarten_m", "primary_f", "primary_m",
        "secondary_f", "secondary_m", "pregnancy_rate", "pregnancy_attendance",
        "skilled_birth_share", "under5_share", "child_visit_coverage",
        "tb_rate", "tb_attendance", "market_share",
    )

    def __post_init__(self):
        for name in self._RATE_FIELDS:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"rate {name}={v!r} outside [0, 1]")
        for name in ("school_days", "market_days"):
            v = getattr(self, name)
            if not 1 <= v <= 366:
                raise ValidationError(f"{name}={v!r} outside [1, 366]")
        if self.visits_per_pregnancy < 0:
            raise ValidationError("visits_per_pregnancy must be >= 0")

    @property
    def hospital_per_capita(self) -> float:
        """Yearly hospital trips per inhabitant implied by the rate set."""
        return (
            self.pregnancy_rate
            * (self.visits_per_pregnancy * self.pregnancy_attendance + self.skilled_birth_share)
            + self.child_visit_coverage * self.under5_share
            + self.tb_rate * self.tb_attendance
        )

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True, eq=False)
class ProductionVector:
    """Yearly trips produced per zone for one purpose."""

    purpose: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1:
            raise ValidationError("production values must be a 1-d vector")
        if np.any(self.values < 0):
            raise ValidationError(f"negative production for purpose {self.purpose}")


@dataclass(frozen=True, eq=False)
class AttractionVector:
    """Relative attraction weight per zone for one purpose.

    Entries sum to 1 when the purpose has any facility in the study area,
    and are all zero otherwise.
    """

    purpose: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1:
            raise ValidationError("attraction values must be a 1-d vector")
        if np.any(self.values < 0):
            raise ValidationError(f"negative attraction for purpose {self.purpose}")


def school_productions(
    zones: Sequence[Zone], rates: DemographicRates, level: str
) -> ProductionVector:
    """Yearly school-trip production for one level (kindergarten/primary/secondary).

    Per zone: ``(rate_f * pop_female + rate_m * pop_male) * school_days``.
    """
    if level not in SCHOOL_LEVELS:
        raise ValidationError(f"unknown school level {level!r}; expected one of {sorted(SCHOOL_LEVELS)}")
    prefix = "kindergarten" if level == "kindergarten" else level
    rate_f = getattr(rates, f"{prefix}_f")
    rate_m = getattr(rates, f"{prefix}_m")
    daily = np.array(
        [rate_f * z.pop_female + rate_m * z.pop_male for z in zones], dtype=float
    )
    return ProductionVector(SCHOOL_LEVELS[level], daily * rates.school_days)


def hospital_productions(zones: Sequence[Zone], rates: DemographicRates) -> ProductionVector:
    """Yearly hospital-trip production: total population times the per-capita factor."""
    factor = rates.hospital_per_capita
    values = np.array([factor * z.pop_total for z in zones], dtype=float)
    return ProductionVector("hospital", values)


def market_productions(zones: Sequence[Zone], rates: DemographicRates) -> ProductionVector:
    """Yearly market-trip production: a population share travelling each market day."""
    values = np.array(
        [rates.market_share * z.pop_total * rates.market_days for z in zones], dtype=float
    )
    return ProductionVector("market", values)


def attraction_vector(zones: Sequence[Zone], purpose: str) -> AttractionVector:
    """Facility-count attraction weights for one purpose.

    All-zero when no zone has a facility of this purpose; that is legal and
    simply yields zero trips downstream.
    """
    if purpose not in PURPOSES:
        raise ValidationError(f"unknown purpose {purpose!r}")
    counts = np.array([z.facility_count(purpose) for z in zones], dtype=float)
    total = counts.sum()
    if total == 0:
        return AttractionVector(purpose, np.zeros(len(zones)))
    return AttractionVector(purpose, counts / total)


def all_productions(
    zones: Sequence[Zone], rates: DemographicRates
) -> dict[str, ProductionVector]:
    """Production vectors for every purpose, keyed by purpose tag."""
    return {
        "kindergarten": school_productions(zones, rates, "kindergarten"),
        "primary_school": school_productions(zones, rates, "primary"),
        "secondary_school": school_productions(zones, rates, "secondary"),
        "hospital": hospital_productions(zones, rates),
        "market": market_productions(zones, rates),
    }


def all_attractions(zones: Sequence[Zone]) -> dict[str, AttractionVector]:
    """Attraction vectors for every purpose, keyed by purpose tag."""
    return {p: attraction_vector(zones, p) for p in PURPOSES}

"""Shared helpers: random study-area instances and the direct-summation oracle."""

from __future__ import annotations

import numpy as np
import pytest

from odflow.demand import PURPOSES, Zone, all_attractions, all_productions, DemographicRates
from odflow.geo import Coordinate, distance_km
from odflow.gravity import GravityConfig, ImpedanceMatrix, ScenarioSpec, impedance_matrix

#: Settlements are kept at least this far apart (km) so half-nearest-neighbor
#: diagonals stay above the impedance floor.
MIN_SEPARATION_KM = 0.3


def random_zones(rng: np.random.Generator, n: int, n_partitions: int = 2) -> list[Zone]:
    """n zones in a ~2 degree box with random demographics and facilities."""
    zones = []
    coords: list[Coordinate] = []
    while len(coords) < n:
        c = Coordinate(
            lat=float(rng.uniform(12.0, 14.0)), lon=float(rng.uniform(-15.0, -13.0))
        )
        if all(distance_km(c, other) >= MIN_SEPARATION_KM for other in coords):
            coords.append(c)
    for i, coord in enumerate(coords):
        zones.append(
            Zone(
                code=f"Z{i:02d}",
                name=f"Settlement {i}",
                country=("Senegal", "Guinea-Bissau")[int(rng.integers(0, 2))],
                subregion=f"part-{int(rng.integers(0, n_partitions))}",
                coord=coord,
                pop_female=int(rng.integers(0, 5000)),
                pop_male=int(rng.integers(0, 5000)),
                facilities={p: int(rng.integers(0, 3)) for p in PURPOSES},
            )
        )
    return zones


def random_instance(rng: np.random.Generator, n_min: int = 3, n_max: int = 10):
    """Zones plus production/attraction vectors for every purpose."""
    n = int(rng.integers(n_min, n_max + 1))
    zones = random_zones(rng, n)
    rates = DemographicRates()
    return zones, all_productions(zones, rates), all_attractions(zones)


def brute_force_distribute(P, A, F) -> np.ndarray:
    """Direct term-by-term evaluation of the distribution formula.

    Scalar Python arithmetic, independent of the vectorized engine path.
    """
    n = len(F.zone_codes)
    q = [[0.0] * n for _ in range(n)]
    for i in range(n):
        denom = 0.0
        for x in range(n):
            denom += float(A.values[x]) * float(F.values[i][x])
        if denom < 1e-300:
            continue
        for j in range(n):
            q[i][j] = float(P.values[i]) * float(A.values[j]) * float(F.values[i][j]) / denom
    return np.array(q)


def both_scenario_matrices(zones, productions, attractions, beta: float = 2.0):
    """Per-purpose OD matrices for the barrier and connected scenarios."""
    from odflow.gravity import distribute

    config = GravityConfig(beta=beta)
    result = {}
    for mode in ("barrier", "connected"):
        F = impedance_matrix(zones, config, ScenarioSpec(mode=mode))
        result[mode] = {
            p: distribute(productions[p], attractions[p], F) for p in PURPOSES
        }
    return result


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)

"""Distance-decay exponent fitting against an observed OD matrix.

The objective is the sum of squared cell errors between the model's
aggregate (unrounded) flows and the observed matrix, minimised over the
exponent with a coarse grid scan followed by golden-section refinement.
The search is fully deterministic; exact ties resolve toward the smaller
exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .demand import AttractionVector, ProductionVector, Zone
from .errors import ContractError
from .gravity import (
    DEFAULT_BETA_RANGE,
    DENOMINATOR_FLOOR,
    ODMatrix,
    ScenarioSpec,
    distance_and_mask,
)

GRID_STEP = 0.05
BRACKET_TOL = 1e-4
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CalibrationResult:
    beta_hat: float
    objective: float
    evaluations: int
    search_range: tuple[float, float]


def aggregate_flows_for_beta(
    beta: float,
    w: np.ndarray,
    mask: np.ndarray,
    productions: Sequence[ProductionVector],
    attractions: Sequence[AttractionVector],
) -> np.ndarray:
    """Aggregate flow matrix at one exponent, given precomputed W and mask."""
    f = mask * w ** (-beta)
    total = np.zeros_like(w)
    by_purpose = {a.purpose: a for a in attractions}
    for p in productions:
        a = by_purpose[p.purpose]
        weights = a.values[np.newaxis, :] * f
        denom = weights.sum(axis=1)
        reachable = denom >= DENOMINATOR_FLOOR
        if np.any(reachable):
            total[reachable] += (
                p.values[reachable, np.newaxis]
                * weights[reachable]
                / denom[reachable, np.newaxis]
            )
    return total


def calibrate_beta(
    observed: ODMatrix,
    zones: Sequence[Zone],
    productions: Sequence[ProductionVector],
    attractions: Sequence[AttractionVector],
    scenario: ScenarioSpec,
    beta_range: tuple[float, float] = DEFAULT_BETA_RANGE,
    min_distance_km: float = 0.1,
) -> CalibrationResult:
    """Fit the decay exponent to an observed matrix by least squares.

    Scans a 0.05-step grid across ``beta_range``, then golden-section
    refines around the best grid point until the bracket is narrower than
    1e-4.  Returns the best exponent seen across all evaluations (ties to
    the smaller value).
    """
    lo, hi = float(beta_range[0]), float(beta_range[1])
    if not (0 < lo < hi) or not math.isfinite(hi):
        raise ValueError(f"beta range must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if observed.n_zones == 0:
        raise ContractError("observed matrix is empty")
    if observed.zone_codes != tuple(z.code for z in zones):
        raise ContractError("observed matrix ordering does not match the zone table")
    purposes = {p.purpose for p in productions}
    if purposes != {a.purpose for a in attractions}:
        raise ContractError("productions and attractions cover different purposes")

    w, mask = distance_and_mask(zones, scenario, min_distance_km)
    target = observed.values

    evaluations = 0

    def sse(beta: float) -> float:
        nonlocal evaluations
        evaluations += 1
        model = aggregate_flows_for_beta(beta, w, mask, productions, attractions)
        diff = model - target
        return float(np.sum(diff * diff))

    best_beta = lo
    best_sse = math.inf

    def consider(beta: float, value: float) -> None:
        nonlocal best_beta, best_sse
        if value < best_sse or (value == best_sse and beta < best_beta):
            best_beta, best_sse = beta, value

    # Coarse grid, ascending so equal objectives keep the smaller beta.
    n_steps = int(math.floor((hi - lo) / GRID_STEP + 1e-9))
    grid = [min(lo + k * GRID_STEP, hi) for k in range(n_steps + 1)]
    if grid[-1] < hi:
        grid.append(hi)
    for beta in grid:
        consider(beta, sse(beta))

    # Golden-section refinement on the bracket around the best grid point.
    a = max(lo, best_beta - GRID_STEP)
    b = min(hi, best_beta + GRID_STEP)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = sse(c), sse(d)
    consider(c, fc)
    consider(d, fd)
    while (b - a) > BRACKET_TOL:
        if fc <= fd:  # keep the lower sub-bracket on ties
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = sse(c)
            consider(c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = sse(d)
            consider(d, fd)

    return CalibrationResult(
        beta_hat=best_beta,
        objective=best_sse,
        evaluations=evaluations,
        search_range=(lo, hi),
    )

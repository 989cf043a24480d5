import numpy as np
import pytest
from conftest import random_zones

from odflow.calibrate import aggregate_flows_for_beta, calibrate_beta
from odflow.demand import DemographicRates, all_attractions, all_productions
from odflow.errors import ContractError
from odflow.gravity import GravityConfig, ODMatrix, ScenarioSpec, distance_and_mask


def synthetic_observed(zones, beta, scenario=None):
    """Noiseless aggregate flows generated by the engine at a known exponent."""
    scenario = scenario or ScenarioSpec()
    rates = DemographicRates()
    productions = list(all_productions(zones, rates).values())
    attractions = list(all_attractions(zones).values())
    w, mask = distance_and_mask(zones, scenario)
    values = aggregate_flows_for_beta(beta, w, mask, productions, attractions)
    observed = ODMatrix(
        zone_codes=tuple(z.code for z in zones),
        purpose="aggregate",
        scenario=scenario.mode,
        values=values,
    )
    return observed, productions, attractions


def nonzero_instance(rng, n=5):
    """Zones guaranteed to have people and at least one facility per purpose."""
    while True:
        zones = random_zones(rng, n)
        productions = all_productions(zones, DemographicRates())
        attractions = all_attractions(zones)
        if all(v.values.sum() > 0 for v in productions.values()) and all(
            v.values.sum() > 0 for v in attractions.values()
        ):
            return zones


class TestRecovery:
    @pytest.mark.parametrize("beta_true", [2.0, 0.7])
    def test_recovers_generating_exponent(self, rng, beta_true):
        zones = nonzero_instance(rng)
        observed, productions, attractions = synthetic_observed(zones, beta_true)
        result = calibrate_beta(
            observed, zones, productions, attractions, ScenarioSpec()
        )
        assert abs(result.beta_hat - beta_true) <= 0.02
        assert result.search_range == (0.5, 3.0)
        assert 0.5 <= result.beta_hat <= 3.0

    def test_deterministic(self, rng):
        zones = nonzero_instance(rng)
        observed, productions, attractions = synthetic_observed(zones, 1.3)
        results = [
            calibrate_beta(observed, zones, productions, attractions, ScenarioSpec())
            for _ in range(2)
        ]
        assert results[0].beta_hat == results[1].beta_hat
        assert results[0].objective == results[1].objective
        assert results[0].evaluations == results[1].evaluations


class TestDegenerateAndErrors:
    def test_all_zero_observed_and_productions_returns_lo(self, rng):
        zones = random_zones(rng, 4)
        zeroed = [
            type(z)(
                code=z.code, name=z.name, country=z.country, subregion=z.subregion,
                coord=z.coord, pop_female=0, pop_male=0, facilities=z.facilities,
            )
            for z in zones
        ]
        productions = list(all_productions(zeroed, DemographicRates()).values())
        attractions = list(all_attractions(zeroed).values())
        observed = ODMatrix(
            tuple(z.code for z in zeroed), "aggregate", "connected", np.zeros((4, 4))
        )
        result = calibrate_beta(
            observed, zeroed, productions, attractions, ScenarioSpec(), beta_range=(0.8, 2.2)
        )
        assert result.beta_hat == 0.8
        assert result.objective == 0.0

    def test_empty_observed(self):
        observed = ODMatrix((), "aggregate", "connected", np.zeros((0, 0)))
        with pytest.raises(ContractError):
            calibrate_beta(observed, [], [], [], ScenarioSpec())

    @pytest.mark.parametrize("bad_range", [(0.0, 3.0), (-1.0, 2.0), (2.0, 2.0), (3.0, 1.0)])
    def test_bad_range(self, rng, bad_range):
        zones = random_zones(rng, 3)
        observed, productions, attractions = synthetic_observed(zones, 2.0)
        with pytest.raises(ValueError):
            calibrate_beta(
                observed, zones, productions, attractions, ScenarioSpec(), beta_range=bad_range
            )

    def test_ordering_mismatch(self, rng):
        zones = random_zones(rng, 3)
        observed, productions, attractions = synthetic_observed(zones, 2.0)
        shuffled = list(reversed(zones))
        with pytest.raises(ContractError):
            calibrate_beta(observed, shuffled, productions, attractions, ScenarioSpec())


def test_objective_not_beaten_on_grid(rng):
    """beta_hat's objective must be <= the objective at every coarse grid point."""
    zones = nonzero_instance(rng)
    observed, productions, attractions = synthetic_observed(zones, 1.7)
    scenario = ScenarioSpec()
    result = calibrate_beta(observed, zones, productions, attractions, scenario)

    w, mask = distance_and_mask(zones, scenario)
    for k in range(51):
        beta = 0.5 + 0.05 * k
        model = aggregate_flows_for_beta(beta, w, mask, productions, attractions)
        sse = float(((model - observed.values) ** 2).sum())
        assert result.objective <= sse + 1e-9 * max(1.0, sse)


def test_barrier_scenario_calibration(rng):
    zones = nonzero_instance(rng)
    scenario = ScenarioSpec(mode="barrier")
    observed, productions, attractions = synthetic_observed(zones, 1.1, scenario)
    result = calibrate_beta(observed, zones, productions, attractions, scenario)
    assert abs(result.beta_hat - 1.1) <= 0.02

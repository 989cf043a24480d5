"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest -s`` to see them on success)."""

import os
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from conftest import brute_force_distribute, random_instance, random_zones

from odflow.calibrate import aggregate_flows_for_beta, calibrate_beta
from odflow.datasets import load_reference_matrices, load_reference_zones
from odflow.demand import (
    PURPOSES,
    AttractionVector,
    DemographicRates,
    ProductionVector,
    all_attractions,
    all_productions,
)
from odflow.flowmap import RenderSpec, default_breaks, render_geojson, render_svg
from odflow.gravity import (
    GravityConfig,
    ImpedanceMatrix,
    ODMatrix,
    ScenarioSpec,
    aggregate,
    distance_and_mask,
    distribute,
    impedance_matrix,
)
from odflow.io import export_flow_interchange, load_zones, read_od_csv, write_od_csv
from odflow.metrics import cross_border_share, directional_shares, scenario_delta, total_trips

GOLDEN_DIR = Path(__file__).parent / "golden"


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} FAIL  {description}")
        raise
    print(f"ACCEPTANCE {number} PASS  {description}")


def test_criterion_1_fixture_totals_and_delta():
    with criterion(1, "fixture totals 1,371,283 / 1,657,493 and the 17.3%/20.9% split"):
        start = time.perf_counter()
        without, with_ = load_reference_matrices()
        t_without = total_trips(without)
        t_with = total_trips(with_)
        comparison = scenario_delta(without, with_)
        elapsed = time.perf_counter() - start

        assert t_without == pytest.approx(1_371_283, rel=1e-3)
        assert t_with == pytest.approx(1_657_493, rel=1e-3)
        assert comparison.delta == pytest.approx(
            286_210, abs=1e-3 * (1_371_283 + 1_657_493)
        )
        assert comparison.increase_vs_with == pytest.approx(0.1727, abs=2e-3)
        assert comparison.increase_vs_without == pytest.approx(0.2087, abs=2e-3)
        assert elapsed < 1.0


def test_criterion_2_cross_scenario_row_conservation_spot_check():
    with criterion(2, "row A conserves 76,277 across scenarios; A->C shift equals A->R = 4,189"):
        without, with_ = load_reference_matrices()
        a = without.index_of("A")
        assert without.values[a].sum() == 76_277
        assert with_.values[a].sum() == 76_277
        c, r = with_.index_of("C"), with_.index_of("R")
        assert without.values[a, c] - with_.values[a, c] == 4_189
        assert with_.values[a, r] == 4_189


def test_criterion_3_row_conservation_property():
    with criterion(3, "row sums equal productions (200 random instances, both scenarios)"):
        rng = np.random.default_rng(3)
        for _ in range(200):
            zones, prods, attrs = random_instance(rng, 3, 10)
            for mode in ("barrier", "connected"):
                F = impedance_matrix(zones, GravityConfig(), ScenarioSpec(mode=mode))
                for purpose in PURPOSES:
                    q = distribute(prods[purpose], attrs[purpose], F)
                    stranded = {code for code, _ in q.stranded}
                    for i, code in enumerate(q.zone_codes):
                        row = float(q.values[i].sum())
                        if code in stranded:
                            assert row == 0.0
                        else:
                            p_i = float(prods[purpose].values[i])
                            assert row == pytest.approx(p_i, rel=1e-9, abs=1e-12)


def test_criterion_4_oracle_equivalence():
    with criterion(4, "engine matches direct formula evaluation to 1e-12 (100 instances)"):
        rng = np.random.default_rng(4)
        for _ in range(100):
            zones, prods, attrs = random_instance(rng, 3, 6)
            mode = ("barrier", "connected")[int(rng.integers(0, 2))]
            F = impedance_matrix(zones, GravityConfig(), ScenarioSpec(mode=mode))
            for purpose in PURPOSES:
                got = distribute(prods[purpose], attrs[purpose], F).values
                want = brute_force_distribute(prods[purpose], attrs[purpose], F)
                np.testing.assert_allclose(got, want, rtol=1e-12, atol=0)


def test_criterion_5_invariance_suite():
    with criterion(5, "distance x7.3, attraction x0.01/x100 and permutation invariance (50 instances)"):
        rng = np.random.default_rng(5)
        for _ in range(50):
            zones, prods, attrs = random_instance(rng, 3, 8)
            codes = tuple(z.code for z in zones)
            w, mask = distance_and_mask(zones, ScenarioSpec())
            beta = 2.0
            F = ImpedanceMatrix(codes, "connected", mask * w ** (-beta))
            purpose = PURPOSES[int(rng.integers(0, len(PURPOSES)))]
            P, A = prods[purpose], attrs[purpose]
            base = distribute(P, A, F).values

            scaled_w = ImpedanceMatrix(codes, "connected", mask * (7.3 * w) ** (-beta))
            np.testing.assert_allclose(
                distribute(P, A, scaled_w).values, base, rtol=1e-12, atol=0
            )

            for c in (0.01, 100.0):
                scaled_a = AttractionVector(purpose, A.values * c)
                np.testing.assert_allclose(
                    distribute(P, scaled_a, F).values, base, rtol=1e-12, atol=0
                )

            perm = rng.permutation(len(zones))
            zones_p = [zones[k] for k in perm]
            F_p = impedance_matrix(zones_p, GravityConfig(beta=beta), ScenarioSpec())
            P_p = ProductionVector(purpose, P.values[perm])
            A_p = AttractionVector(purpose, A.values[perm])
            got = distribute(P_p, A_p, F_p).values
            np.testing.assert_allclose(got, base[np.ix_(perm, perm)], rtol=1e-12, atol=0)


def test_criterion_6_scenario_monotonicity():
    with criterion(6, "connected totals never below barrier; within-partition cells never grow"):
        rng = np.random.default_rng(6)
        for _ in range(100):
            zones, prods, attrs = random_instance(rng, 3, 10)
            per_mode = {}
            for mode in ("barrier", "connected"):
                F = impedance_matrix(zones, GravityConfig(), ScenarioSpec(mode=mode))
                per_mode[mode] = aggregate(
                    [distribute(prods[p], attrs[p], F) for p in PURPOSES]
                )
            total_b = float(per_mode["barrier"].values.sum())
            total_c = float(per_mode["connected"].values.sum())
            assert total_c >= total_b - 1e-9 * max(1.0, total_b)

            same_part = np.array(
                [[zi.subregion == zj.subregion for zj in zones] for zi in zones]
            )
            qb = per_mode["barrier"].values[same_part]
            qc = per_mode["connected"].values[same_part]
            assert np.all(qc <= qb + 1e-9 * np.maximum(1.0, qb))


def _calibration_instance(rng):
    while True:
        zones = random_zones(rng, 5)
        prods = all_productions(zones, DemographicRates())
        attrs = all_attractions(zones)
        if all(v.values.sum() > 0 for v in prods.values()) and all(
            v.values.sum() > 0 for v in attrs.values()
        ):
            return zones, list(prods.values()), list(attrs.values())


def test_criterion_7_calibration_recovery():
    with criterion(7, "decay exponent recovered to +-0.02 for 20 targets in [0.6, 2.9]"):
        rng = np.random.default_rng(7)
        scenario = ScenarioSpec()
        for beta_true in np.linspace(0.6, 2.9, 20):
            zones, prods, attrs = _calibration_instance(rng)
            w, mask = distance_and_mask(zones, scenario)
            observed = ODMatrix(
                zone_codes=tuple(z.code for z in zones),
                purpose="aggregate",
                scenario=scenario.mode,
                values=aggregate_flows_for_beta(float(beta_true), w, mask, prods, attrs),
            )
            first = calibrate_beta(observed, zones, prods, attrs, scenario)
            second = calibrate_beta(observed, zones, prods, attrs, scenario)
            assert abs(first.beta_hat - float(beta_true)) <= 0.02
            assert first.beta_hat == second.beta_hat  # bit-identical reruns
            assert first.objective == second.objective


def test_criterion_8_rendering_determinism_and_counts():
    with criterion(8, "golden-file byte equality; visible count and draw order by brute force"):
        zones = load_reference_zones()
        without, with_ = load_reference_matrices()
        spec = RenderSpec(breaks=default_breaks(without, with_, 5), min_flow=5000.0)

        svg = render_svg(without, zones, spec)
        geojson = render_geojson(without, zones, min_flow=5000.0, breaks=spec.breaks)
        assert svg.encode() == (GOLDEN_DIR / "fixture_map.svg").read_bytes()
        assert geojson.encode() == (GOLDEN_DIR / "fixture_map.geojson").read_bytes()

        rounded = np.round(without.values)
        off_diag = ~np.eye(26, dtype=bool)
        expected_visible = int(((rounded >= 5000.0) & (rounded > 0) & off_diag).sum())
        import re

        trips = [int(t) for t in re.findall(r'data-trips="(\d+)"', svg)]
        assert len(trips) == expected_visible
        assert all(a >= b for a, b in zip(trips, trips[1:]))  # non-increasing

        # Determinism across repeated invocations.
        assert render_svg(without, zones, spec) == svg
        assert render_geojson(without, zones, min_flow=5000.0, breaks=spec.breaks) == geojson


def test_criterion_9_format_round_trips(tmp_path):
    with criterion(9, "OD CSV write/read identity (100 matrices); export rows match threshold count"):
        rng = np.random.default_rng(9)
        for k in range(100):
            n = int(rng.integers(1, 12))
            codes = tuple(f"Z{i}" for i in range(n))
            values = rng.integers(0, 200_000, size=(n, n)).astype(float)
            m = ODMatrix(codes, "aggregate", "connected", values)
            path = tmp_path / f"roundtrip_{k}.csv"
            write_od_csv(m, path)
            back = read_od_csv(path)
            assert back.zone_codes == codes
            np.testing.assert_array_equal(back.values, values)

        zones = load_reference_zones()
        without, _ = load_reference_matrices()
        for threshold in (0.0, 1.0, 2_500.0, 40_000.0):
            _, flows = export_flow_interchange(without, zones, min_flow=threshold)
            rounded = np.round(without.values)
            expected = int(((rounded >= threshold) & (rounded > 0)).sum())
            assert len(flows.splitlines()) - 1 == expected


# The published share statistics need the study's own per-zone country labels
# and coordinates, which are not redistributable; these checks only run when
# ODFLOW_DATASET14_ZONES points at a verified zone table for codes A..Z.
_DATASET14 = os.environ.get("ODFLOW_DATASET14_ZONES")
needs_dataset14 = pytest.mark.skipif(
    not _DATASET14, reason="verified per-zone metadata not attached"
)


@needs_dataset14
def test_conditional_cross_border_share():
    with criterion("C1", "cross-border share of connected trips ~= 31% +-2pp"):
        table = load_zones(_DATASET14)
        _, with_ = load_reference_matrices()
        share = cross_border_share(with_, table.zones)
        assert share == pytest.approx(0.31, abs=0.02)


@needs_dataset14
def test_conditional_directional_shares():
    with criterion("C2", "directional split 74% W->E and a 93/7 N-S split (+-2pp)"):
        table = load_zones(_DATASET14)
        _, with_ = load_reference_matrices()
        shares = directional_shares(with_, table.zones)
        assert shares["west_to_east"] == pytest.approx(0.74, abs=0.02)
        # The source is self-contradictory on the N-S orientation; accept the
        # 93/7 split either way round.
        assert (
            shares["south_to_north"] == pytest.approx(0.93, abs=0.02)
            or shares["north_to_south"] == pytest.approx(0.93, abs=0.02)
        )

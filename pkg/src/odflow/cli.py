"""Command-line surface binding the pipeline end to end.

Subcommands mirror the batch stages: ``validate`` a zone table, print
``demand`` productions, ``compute`` scenario OD matrices, ``compare`` two
matrices, ``calibrate`` the decay exponent, ``render`` a flow map and
``export-flows`` interchange CSVs.  Defaults reproduce the reference
configuration (beta 2, 200 school days, weekly markets).

Exit codes: 0 success, 1 validation/contract errors (one machine-parsable
``ERROR:`` line on stderr), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from . import calibrate as _calibrate
from . import demand, flowmap, gravity, metrics
from .errors import ConfigurationError, FlowModelError
from .io import ZoneTable, export_flow_interchange, load_zones, read_od_csv, write_od_csv


@dataclass
class RunConfig:
    """Merged view of config-file values and CLI flags (flags win)."""

    rates: demand.DemographicRates
    gravity: gravity.GravityConfig
    scenario: gravity.ScenarioSpec
    render: flowmap.RenderSpec
    female_share_default: float = 0.5


_NAMESPACES = {
    "rates": demand.DemographicRates.field_names(),
    "gravity": gravity.GravityConfig.field_names(),
    "scenario": gravity.ScenarioSpec.field_names(),
    "render": flowmap.RenderSpec.field_names(),
    "io": ("female_share_default",),
}

_TUPLE_KEYS = {"render.breaks", "render.flow_colors", "render.widths",
               "render.node_radii", "render.node_breaks"}


def _flatten(prefix: str, obj, into: dict) -> None:
    if isinstance(obj, dict):
        for key, value in obj.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), value, into)
    else:
        into[prefix] = obj


def load_run_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus dotted-key overrides."""
    merged: dict[str, object] = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ConfigurationError("config file must hold a JSON object")
        _flatten("", raw, merged)
    merged.update(overrides or {})

    kwargs: dict[str, dict] = {ns: {} for ns in _NAMESPACES}
    for key, value in merged.items():
        ns, _, field_name = key.partition(".")
        if ns not in _NAMESPACES or field_name not in _NAMESPACES[ns]:
            raise ConfigurationError(f"unknown configuration key {key!r}")
        if key in _TUPLE_KEYS and value is not None:
            value = tuple(value)
        kwargs[ns][field_name] = value
    return RunConfig(
        rates=demand.DemographicRates(**kwargs["rates"]),
        gravity=gravity.GravityConfig(**kwargs["gravity"]),
        scenario=gravity.ScenarioSpec(**kwargs["scenario"]),
        render=flowmap.RenderSpec(**kwargs["render"]),
        female_share_default=kwargs["io"].get("female_share_default", 0.5),
    )


def _styled(text: str) -> str:
    if os.environ.get("ODFLOW_NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\x1b[1m{text}\x1b[0m"


def _fmt_num(v: float) -> str:
    """Fixed decimal formatting with trailing zeros trimmed (deterministic)."""
    text = f"{float(v):.6f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-") else "0"


def _distribute_all(zones, cfg: RunConfig, scenario: gravity.ScenarioSpec):
    productions = demand.all_productions(zones, cfg.rates)
    attractions = demand.all_attractions(zones)
    impedance = gravity.impedance_matrix(zones, cfg.gravity, scenario)
    per_purpose = {
        purpose: gravity.distribute(productions[purpose], attractions[purpose], impedance)
        for purpose in demand.PURPOSES
    }
    return per_purpose, gravity.aggregate(list(per_purpose.values()))


def _cmd_validate(args) -> int:
    cfg = load_run_config(args.config)
    table = load_zones(args.zones, female_share_default=cfg.female_share_default)
    for warning in table.warnings:
        print(f"WARNING: {warning}")
    print(f"OK: {len(table)} zones, codes {table.codes[0]}..{table.codes[-1]}"
          if len(table) else "OK: 0 zones")
    return 0


def _cmd_demand(args) -> int:
    cfg = load_run_config(args.config, _rate_overrides(args))
    table = load_zones(args.zones, female_share_default=cfg.female_share_default)
    productions = demand.all_productions(table.zones, cfg.rates)
    print(",".join(["code", *demand.PURPOSES]))
    for idx, zone in enumerate(table.zones):
        row = [zone.code] + [_fmt_num(productions[p].values[idx]) for p in demand.PURPOSES]
        print(",".join(row))
    return 0


def _rate_overrides(args) -> dict:
    overrides: dict[str, object] = {}
    if getattr(args, "school_days", None) is not None:
        overrides["rates.school_days"] = args.school_days
    if getattr(args, "market_days", None) is not None:
        overrides["rates.market_days"] = args.market_days
    if getattr(args, "beta", None) is not None:
        overrides["gravity.beta"] = args.beta
    return overrides


def _cmd_compute(args) -> int:
    overrides = _rate_overrides(args)
    overrides["scenario.mode"] = args.scenario
    cfg = load_run_config(args.config, overrides)
    table = load_zones(args.zones, female_share_default=cfg.female_share_default)
    per_purpose, total = _distribute_all(table.zones, cfg, cfg.scenario)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for purpose, matrix in per_purpose.items():
        write_od_csv(matrix, out_dir / f"od_{purpose}.csv")
    write_od_csv(total, out_dir / "od_aggregate.csv")

    lines = ["purpose,code,lost_trips"]
    for purpose, matrix in per_purpose.items():
        for code, lost in matrix.stranded:
            lines.append(f"{purpose},{code},{_fmt_num(lost)}")
    (out_dir / "stranded.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    print(f"scenario {args.scenario}: total {_fmt_num(total.values.sum())} trips/year")
    print(f"wrote {len(per_purpose) + 2} files to {out_dir}")
    return 0


def _comparison_report(table: ZoneTable, without, with_) -> dict:
    comparison = metrics.scenario_delta(without, with_)
    report: dict[str, object] = {
        "total_without": comparison.total_without,
        "total_with": comparison.total_with,
        "delta": comparison.delta,
        "increase_vs_without": comparison.increase_vs_without,
        "increase_vs_with": comparison.increase_vs_with,
    }
    for label, matrix in (("without", without), ("with", with_)):
        report[f"cross_border_share_{label}"] = metrics.cross_border_share(matrix, table.zones)
        for key, value in metrics.directional_shares(matrix, table.zones).items():
            report[f"{key}_{label}"] = value
    for code, value in zip(table.codes, comparison.per_zone_row_deltas):
        report[f"row_delta.{code}"] = float(value)
    return report


def _cmd_compare(args) -> int:
    cfg = load_run_config(args.config)
    table = load_zones(args.zones, female_share_default=cfg.female_share_default)
    without = read_od_csv(args.without, scenario="without")
    with_ = read_od_csv(args.with_, scenario="with")
    report = _comparison_report(table, without, with_)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(_styled("scenario comparison"))
        for key, value in report.items():
            print(f"{key}\t{_fmt_num(value)}")
    return 0


def _cmd_calibrate(args) -> int:
    cfg = load_run_config(args.config, _rate_overrides(args))
    table = load_zones(args.zones, female_share_default=cfg.female_share_default)
    observed = read_od_csv(args.observed)
    scenario = replace(cfg.scenario, mode=args.scenario)
    try:
        lo, hi = (float(part) for part in args.range.split(":"))
    except ValueError:
        raise ConfigurationError(f"--range must look like 0.5:3.0, got {args.range!r}") from None
    productions = list(demand.all_productions(table.zones, cfg.rates).values())
    attractions = list(demand.all_attractions(table.zones).values())
    result = _calibrate.calibrate_beta(
        observed, table.zones, productions, attractions, scenario,
        beta_range=(lo, hi), min_distance_km=cfg.gravity.min_distance_km,
    )
    print(f"beta_hat\t{_fmt_num(result.beta_hat)}")
    print(f"objective\t{_fmt_num(result.objective)}")
    print(f"evaluations\t{result.evaluations}")
    return 0


def _cmd_render(args) -> int:
    overrides: dict[str, object] = {}
    if args.min_flow is not None:
        overrides["render.min_flow"] = args.min_flow
    if args.breaks is not None:
        try:
            overrides["render.breaks"] = tuple(float(b) for b in args.breaks.split(","))
        except ValueError:
            raise ConfigurationError(f"--breaks must be comma-separated numbers, got {args.breaks!r}") from None
    cfg = load_run_config(args.config, overrides)
    table = load_zones(args.zones, female_share_default=cfg.female_share_default)
    matrix = read_od_csv(args.od)
    Path(args.out).write_text(
        flowmap.render_svg(matrix, table, cfg.render), encoding="utf-8", newline=""
    )
    print(f"wrote {args.out}")
    if args.geojson:
        Path(args.geojson).write_text(
            flowmap.render_geojson(matrix, table, cfg.render.min_flow, cfg.render.breaks),
            encoding="utf-8", newline="",
        )
        print(f"wrote {args.geojson}")
    return 0


def _cmd_export_flows(args) -> int:
    cfg = load_run_config(args.config)
    table = load_zones(args.zones, female_share_default=cfg.female_share_default)
    matrix = read_od_csv(args.od)
    nodes_csv, flows_csv = export_flow_interchange(matrix, table, min_flow=args.min_flow)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "nodes.csv").write_text(nodes_csv, encoding="utf-8", newline="")
    (out_dir / "flows.csv").write_text(flows_csv, encoding="utf-8", newline="")
    print(f"wrote {out_dir / 'nodes.csv'} and {out_dir / 'flows.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odflow",
        description="Demographic trip production, gravity distribution and flow maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--zones", required=True, help="zone table CSV")
        p.add_argument("--config", default=None, help="JSON config file (dotted keys)")

    p = sub.add_parser("validate", help="schema-check a zone table")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("demand", help="per-zone, per-purpose yearly productions (CSV to stdout)")
    common(p)
    p.add_argument("--school-days", type=int, default=None)
    p.add_argument("--market-days", type=int, default=None)
    p.set_defaults(func=_cmd_demand)

    p = sub.add_parser("compute", help="distribute demand into per-purpose and aggregate OD CSVs")
    common(p)
    p.add_argument("--scenario", required=True, choices=[gravity.BARRIER, gravity.CONNECTED])
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--school-days", type=int, default=None)
    p.add_argument("--market-days", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("compare", help="scenario comparison, cross-border and directional shares")
    common(p)
    p.add_argument("--without", required=True, help="OD CSV for the restricted scenario")
    p.add_argument("--with", dest="with_", required=True, help="OD CSV for the linked scenario")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("calibrate", help="fit the distance-decay exponent to an observed matrix")
    common(p)
    p.add_argument("--observed", required=True, help="observed OD CSV")
    p.add_argument("--scenario", required=True, choices=[gravity.BARRIER, gravity.CONNECTED])
    p.add_argument("--range", default="0.5:3.0", help="search range lo:hi")
    p.add_argument("--school-days", type=int, default=None)
    p.add_argument("--market-days", type=int, default=None)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("render", help="render an OD matrix to SVG (and optionally GeoJSON)")
    common(p)
    p.add_argument("--od", required=True, help="OD CSV to draw")
    p.add_argument("--out", required=True, help="SVG output path")
    p.add_argument("--geojson", default=None, help="optional GeoJSON output path")
    p.add_argument("--breaks", default=None, help="comma-separated class boundaries")
    p.add_argument("--min-flow", type=float, default=None, help="hide flows below this")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("export-flows", help="write nodes.csv and flows.csv interchange files")
    common(p)
    p.add_argument("--od", required=True, help="OD CSV to export")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--min-flow", type=float, default=0.0)
    p.set_defaults(func=_cmd_export_flows)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse argv and execute one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage errors (exit 2) and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FlowModelError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())

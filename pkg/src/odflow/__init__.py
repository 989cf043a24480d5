"""Travel-demand toolkit for small cross-border study areas.

Builds yearly trip productions from zone demographics, distributes them with
a production-constrained gravity model under barrier/connected connectivity
scenarios, compares the resulting OD matrices, calibrates the distance-decay
exponent, and renders classed flow maps.
"""

from .calibrate import CalibrationResult, calibrate_beta
from .demand import (
    PURPOSES,
    AttractionVector,
    DemographicRates,
    ProductionVector,
    Zone,
    all_attractions,
    all_productions,
    attraction_vector,
    hospital_productions,
    market_productions,
    school_productions,
)
from .errors import (
    ConfigurationError,
    ContractError,
    FlowModelError,
    ParseError,
    ValidationError,
)
from .flowmap import RenderSpec, classify_flows, default_breaks, render_geojson, render_svg
from .geo import Coordinate, distance_km, intra_zonal_distance, parse_dm
from .gravity import (
    BARRIER,
    CONNECTED,
    GravityConfig,
    ImpedanceMatrix,
    ODMatrix,
    ScenarioSpec,
    aggregate,
    distribute,
    impedance_matrix,
    round_matrix,
)
from .io import (
    ZoneTable,
    export_flow_interchange,
    load_zones,
    read_od_csv,
    write_od_csv,
)
from .metrics import (
    ScenarioComparison,
    cross_border_share,
    directional_shares,
    scenario_delta,
    total_trips,
)

__version__ = "0.1.0"

__all__ = [
    "PURPOSES",
    "BARRIER",
    "CONNECTED",
    "AttractionVector",
    "CalibrationResult",
    "ConfigurationError",
    "ContractError",
    "Coordinate",
    "DemographicRates",
    "FlowModelError",
    "GravityConfig",
    "ImpedanceMatrix",
    "ODMatrix",
    "ParseError",
    "ProductionVector",
    "RenderSpec",
    "ScenarioComparison",
    "ScenarioSpec",
    "ValidationError",
    "Zone",
    "ZoneTable",
    "aggregate",
    "all_attractions",
    "all_productions",
    "attraction_vector",
    "calibrate_beta",
    "classify_flows",
    "cross_border_share",
    "default_breaks",
    "directional_shares",
    "distance_km",
    "distribute",
    "export_flow_interchange",
    "hospital_productions",
    "impedance_matrix",
    "intra_zonal_distance",
    "load_zones",
    "market_productions",
    "parse_dm",
    "read_od_csv",
    "render_geojson",
    "render_svg",
    "round_matrix",
    "scenario_delta",
    "school_productions",
    "total_trips",
    "write_od_csv",
]

"""Bundled sample data for the Senegal / Guinea-Bissau border study area.

Two yearly OD matrices over 26 settlements (codes A-Z) are shipped as
reference data: ``without_bridge`` (movement confined to each river bank)
and ``with_bridge`` (cross-river movement possible).  The zone table carries
the same codes, names and bank split; its coordinates, country labels,
populations and facility counts are synthetic stand-ins chosen to be
plausible for the area (the study's source spreadsheet is not
redistributable), so they are suitable for demos and format tests but not
for reproducing published share statistics.
"""

from __future__ import annotations

from importlib import resources

from .gravity import BARRIER, CONNECTED, ODMatrix
from .io import ZoneTable, load_zones, read_od_csv

_SCENARIO_FILES = {
    "without_bridge": ("od_without_bridge.csv", BARRIER),
    "with_bridge": ("od_with_bridge.csv", CONNECTED),
}


def _data_path(name: str):
    return resources.files("odflow").joinpath("data", name)


def load_reference_zones() -> ZoneTable:
    """The bundled 26-zone table (codes A-Z, file order defines matrix order)."""
    with resources.as_file(_data_path("zones.csv")) as path:
        return load_zones(path)


def load_reference_od(scenario: str) -> ODMatrix:
    """One bundled reference OD matrix: ``without_bridge`` or ``with_bridge``."""
    try:
        filename, tag = _SCENARIO_FILES[scenario]
    except KeyError:
        raise KeyError(
            f"unknown scenario {scenario!r}; expected one of {sorted(_SCENARIO_FILES)}"
        ) from None
    with resources.as_file(_data_path(filename)) as path:
        return read_od_csv(path, purpose="aggregate", scenario=tag)


def load_reference_matrices() -> tuple[ODMatrix, ODMatrix]:
    """Both reference matrices as (without_bridge, with_bridge)."""
    return load_reference_od("without_bridge"), load_reference_od("with_bridge")

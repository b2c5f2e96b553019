"""Multizone thermal and airflow simulation of tropical dwellings, with a prescription checker."""

from .building_io import load_building, load_fixture
from .model import BuildingModel, validate
from .simulation import SimulationConfig, SimulationResult, simulate
from .weather import load_weather, typical_day_path

__all__ = ["BuildingModel", "SimulationConfig", "SimulationResult", "load_building", "load_fixture",
           "load_weather", "simulate", "typical_day_path", "validate"]

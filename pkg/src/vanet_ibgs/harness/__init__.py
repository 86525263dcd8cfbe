"""Scenarios, the two-stage pipeline and benchmark reports."""

from .pipeline import BenchReport, BenchRow, run_pipeline
from .scenario import Scenario, ScenarioError, gen_scenario, load_scenario, parse_scenario

__all__ = [
    "BenchReport", "BenchRow", "run_pipeline", "Scenario", "ScenarioError", "gen_scenario",
    "load_scenario", "parse_scenario",
]

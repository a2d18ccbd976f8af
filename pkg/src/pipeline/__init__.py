"""Scenario files, the scenario runner and batch execution."""

from src.pipeline.scenario import OutputFormat, OutputSpec, Scenario, ScenarioReport, TaskKind
from src.pipeline.scenario_pipeline import ScenarioPipeline, run_batch, run_scenario

__all__ = [
    "OutputFormat",
    "OutputSpec",
    "Scenario",
    "ScenarioPipeline",
    "ScenarioReport",
    "TaskKind",
    "run_batch",
    "run_scenario",
]

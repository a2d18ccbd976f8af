"""
Scenario files and scenario reports

A scenario is a versioned JSON document naming one model, an ordered task list
and the propagation settings. Schema (version 1)::

    {
      "schema_version": 1,
      "name": "bowtie_n4",
      "model": {"kind": "BowTie", "p": [0.4, 0.3, 0.5], "r": [1.0, -0.5, 2.0]},
      "tasks": ["VerifyCommutant", "Spectrum"],
      "propagation": {"horizon": 200.0, "rel_tol": 1e-10},
      "seed": 0,
      "horizons": null,
      "cutoffs": null,
      "compare_states": null,
      "output": {"path": null, "format": "json"}
    }

``model`` is a ModelSpec object with its "kind" discriminator; propagation
fields left out fall back to config/defaults.yaml.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.closedform.probabilities import has_closed_form
from src.models.specs import BORDERED_KINDS, ModelSpec
from src.propagator.config import PropagationConfig
from src.utils.error_handling import ReportIOError, ReportValidationError, ScenarioError
from src.utils.settings import load_settings

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class TaskKind(str, Enum):
    VERIFY_COMMUTANT = "VerifyCommutant"
    SPECTRUM = "Spectrum"
    PROPAGATE = "Propagate"
    COMPARE_CLOSED_FORM = "CompareClosedForm"
    CONVERGENCE_STUDY = "ConvergenceStudy"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class OutputSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON


def _default_seed() -> int:
    return load_settings().verification.seed


class Scenario(BaseModel):
    """One model, an ordered task list and the settings they run with."""

    model_config = ConfigDict(frozen=True)

    schema_version: int = SCHEMA_VERSION
    name: str
    model: ModelSpec
    tasks: List[TaskKind]
    propagation: PropagationConfig = Field(default_factory=PropagationConfig.from_settings)
    seed: int = Field(default_factory=_default_seed)
    horizons: Optional[List[float]] = None
    cutoffs: Optional[List[int]] = None
    compare_states: Optional[List[int]] = None
    output: OutputSpec = OutputSpec()

    @field_validator("schema_version")
    @classmethod
    def _known_version(cls, v: int) -> int:
        if v != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema_version {v}, expected {SCHEMA_VERSION}")
        return v

    @field_validator("propagation", mode="before")
    @classmethod
    def _propagation_defaults(cls, v: Any) -> Any:
        if isinstance(v, dict):
            return PropagationConfig.from_settings(**v)
        return v

    @model_validator(mode="after")
    def _check_tasks(self) -> "Scenario":
        if not self.tasks:
            raise ScenarioError(f"scenario '{self.name}' has no tasks")
        kind = self.model.kind
        if TaskKind.COMPARE_CLOSED_FORM in self.tasks and not has_closed_form(self.model):
            raise ScenarioError(f"CompareClosedForm: no closed form for {kind.value} with N={self.model.dim}")
        for task in (TaskKind.VERIFY_COMMUTANT, TaskKind.SPECTRUM):
            if task in self.tasks and kind not in BORDERED_KINDS:
                raise ScenarioError(f"{task.value} needs a bordered model, got {kind.value}")
        return self

    @classmethod
    def from_file(cls, filepath: str) -> "Scenario":
        path = Path(filepath)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ReportIOError(f"cannot read scenario {path}: {e}") from e
        try:
            return cls.model_validate(json.loads(text))
        except json.JSONDecodeError as e:
            raise ScenarioError(f"{path} is not valid JSON: {e}") from e
        except ValidationError as e:
            raise ScenarioError(f"{path}: {e}") from e


def _non_finite_paths(value: Any, path: str = "") -> List[str]:
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return []
    if isinstance(value, float):
        return [] if math.isfinite(value) else [path or "<root>"]
    if isinstance(value, dict):
        return [p for k, v in value.items() for p in _non_finite_paths(v, f"{path}.{k}" if path else str(k))]
    if isinstance(value, (list, tuple)):
        return [p for i, v in enumerate(value) for p in _non_finite_paths(v, f"{path}[{i}]")]
    raise ReportValidationError(f"{path}: unsupported report value of type {type(value).__name__}")


@dataclass
class ScenarioReport:
    """Per-task results of one scenario run.

    ``results`` holds the full structure of every task; ``tables`` holds the
    flat rows written to CSV, one table per task. Timings are wall-clock and
    stay out of the JSON form unless asked for.
    """

    scenario: str
    model: Dict[str, Any]
    seed: int
    propagation: Dict[str, Any]
    results: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    breaches: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        bad = _non_finite_paths({"results": self.results, "tables": self.tables, "model": self.model})
        if bad:
            raise ReportValidationError(f"report '{self.scenario}' has non-finite entries at {', '.join(bad[:5])}")

    @property
    def passed(self) -> bool:
        return not self.breaches

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        data = {
            "scenario": self.scenario,
            "schema_version": SCHEMA_VERSION,
            "model": self.model,
            "seed": self.seed,
            "propagation": self.propagation,
            "results": self.results,
            "breaches": self.breaches,
        }
        if include_timings:
            data["timings"] = self.timings
        return data

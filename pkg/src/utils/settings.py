"""Package settings: config/defaults.yaml overlaid with environment variables."""

from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field

from src.utils.error_handling import ScenarioError

ROOT = Path(__file__).resolve().parent.parent.parent
DEFAULTS_PATH = ROOT / "config" / "defaults.yaml"


class PropagationDefaults(BaseModel):
    horizon: float = 200.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 2_000_000
    phase_stripping: bool = True
    asymptotic_basis: str = "adiabatic"


class VerificationDefaults(BaseModel):
    seed: int = 0
    u_samples: int = 20
    u_min: float = -5.0
    u_max: float = 5.0
    commutator_tol: float = 1e-10
    triviality_tol: float = 1e-8
    root_rel_tol: float = 1e-10
    symmetry_rank_tol: float = 1e-9


class ComparisonDefaults(BaseModel):
    probability_tol: float = 1e-3
    truncated_probability_tol: float = 5e-3
    convergence_tol: float = 1e-4


class Settings(BaseModel):
    output_dir: str = "outputs"
    threads: int = Field(default=4, ge=1)
    log_level: str = "INFO"
    propagation: PropagationDefaults = PropagationDefaults()
    verification: VerificationDefaults = VerificationDefaults()
    comparison: ComparisonDefaults = ComparisonDefaults()

    @classmethod
    def load(cls, filepath: Optional[str] = None) -> "Settings":
        path = Path(filepath) if filepath else DEFAULTS_PATH
        data = {}
        if path.exists():
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        elif filepath:
            raise ScenarioError(f"settings file not found: {path}")
        settings = cls(**data)
        return settings._with_env()

    def _with_env(self) -> "Settings":
        load_dotenv(ROOT / ".env")
        update = {}
        if os.getenv("LZ_THREADS"):
            update["threads"] = int(os.environ["LZ_THREADS"])
        if os.getenv("LZ_OUTPUT_DIR"):
            update["output_dir"] = os.environ["LZ_OUTPUT_DIR"]
        if os.getenv("LZ_LOG_LEVEL"):
            update["log_level"] = os.environ["LZ_LOG_LEVEL"]
        settings = self.model_copy(update=update)
        if os.getenv("LZ_SEED"):
            verification = settings.verification.model_copy(update={"seed": int(os.environ["LZ_SEED"])})
            settings = settings.model_copy(update={"verification": verification})
        return settings


@lru_cache(maxsize=1)
def load_settings() -> Settings:
    return Settings.load()

"""Propagation settings."""

from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator

from src.utils.error_handling import ParameterError
from src.utils.settings import Settings, load_settings

MIN_TOL = 1e-14
MAX_TOL = 1e-3


class AsymptoticBasis(str, Enum):
    ADIABATIC = "adiabatic"
    DIABATIC = "diabatic"


class PropagationConfig(BaseModel):
    """Integrate from -horizon to +horizon.

    With ``asymptotic_basis`` = adiabatic the initial and final states are the
    eigenvectors of H(-T) and H(+T) carrying the diabatic labels they tend to;
    diabatic uses the basis vectors themselves.
    """

    model_config = ConfigDict(frozen=True)

    horizon: float = 200.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    phase_stripping: bool = True
    max_steps: int = 2_000_000
    method: str = "DOP853"
    asymptotic_basis: AsymptoticBasis = AsymptoticBasis.ADIABATIC

    @field_validator("horizon")
    @classmethod
    def _positive_horizon(cls, v: float) -> float:
        if v <= 0:
            raise ParameterError(f"horizon must be positive, got {v}")
        return v

    @field_validator("rel_tol", "abs_tol")
    @classmethod
    def _tolerance_range(cls, v: float) -> float:
        if not MIN_TOL <= v <= MAX_TOL:
            raise ParameterError(f"tolerance {v} outside [{MIN_TOL}, {MAX_TOL}]")
        return v

    @field_validator("max_steps")
    @classmethod
    def _positive_steps(cls, v: int) -> int:
        if v <= 0:
            raise ParameterError("max_steps must be positive")
        return v

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> "PropagationConfig":
        settings = settings or load_settings()
        values = settings.propagation.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

"""Hamiltonian pencils, model parameter records and gauge fixing."""

from src.models.builders import (
    build,
    build_bowtie,
    build_equal_slope,
    build_generalized_bowtie,
    build_linear_chain,
    build_oscillator,
    build_su11_sector,
    build_su2_spin,
)
from src.models.gauge import degauge
from src.models.pencils import GaugePhases, MatrixPencil, identity_pencil
from src.models.specs import ModelKind, ModelSpec

__all__ = [
    "GaugePhases",
    "MatrixPencil",
    "ModelKind",
    "ModelSpec",
    "build",
    "build_bowtie",
    "build_equal_slope",
    "build_generalized_bowtie",
    "build_linear_chain",
    "build_oscillator",
    "build_su11_sector",
    "build_su2_spin",
    "degauge",
    "identity_pencil",
]

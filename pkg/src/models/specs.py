"""Model parameter records with per-kind validation and JSON round-tripping.

JSON schema (one object, ``kind`` discriminates which fields are read)::

    {"kind": "BowTie", "p": [1.0, 1.0], "r": [1.0, -1.0]}
    {"kind": "EqualSlope", "p": [...], "a": [...], "b": 1.0}
    {"kind": "GeneralizedBowTie", "p": [...], "r": [...], "epsilon": 2.0}
    {"kind": "Su2Spin", "g": 0.8, "j": 1.0}
    {"kind": "Oscillator", "g_o": 0.4, "cutoff": 60}
    {"kind": "LinearChain", "g_lc": 0.5, "n_min": -30, "n_max": 30}
    {"kind": "Su11Sector", "g_tilde": 0.3, "k": 0.25, "cutoff": 80}

``coupling_phases`` (radians, one per p entry) turns the couplings into
p_k = |p_k| exp(-i theta_k); builders then route the pencil through degauge.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, model_validator

from src.utils.error_handling import (
    CutoffTooSmall,
    DuplicateSlope,
    InvalidBargmannIndex,
    InvalidSpin,
    ParameterError,
    WindowTooSmall,
    ZeroCoupling,
    ZeroSlope,
    ZeroSlopeEntry,
)

MIN_CUTOFF = 4
ONE_MODE_INDICES = (Fraction(1, 4), Fraction(3, 4))


class ModelKind(str, Enum):
    EQUAL_SLOPE = "EqualSlope"
    BOW_TIE = "BowTie"
    GENERALIZED_BOW_TIE = "GeneralizedBowTie"
    SU2_SPIN = "Su2Spin"
    OSCILLATOR = "Oscillator"
    LINEAR_CHAIN = "LinearChain"
    SU11_SECTOR = "Su11Sector"


BORDERED_KINDS = (ModelKind.EQUAL_SLOPE, ModelKind.BOW_TIE, ModelKind.GENERALIZED_BOW_TIE)
TRUNCATED_KINDS = (ModelKind.OSCILLATOR, ModelKind.LINEAR_CHAIN, ModelKind.SU11_SECTOR)


def half_integer(value: float) -> Optional[Fraction]:
    """Return value as a Fraction if 2*value is an integer, else None."""
    twice = Fraction(value).limit_denominator(64) * 2
    if twice.denominator != 1 or abs(float(twice) - 2 * value) > 1e-12:
        return None
    return twice / 2


def check_spin(j: float) -> Fraction:
    jf = half_integer(j)
    if jf is None or jf < Fraction(1, 2):
        raise InvalidSpin(f"spin j={j} must be one of 1/2, 1, 3/2, ...")
    return jf


def check_bargmann_index(k: float) -> Fraction:
    if k <= 0:
        raise InvalidBargmannIndex(f"Bargmann index k={k} must be positive")
    kf = Fraction(k).limit_denominator(64)
    if abs(float(kf) - k) > 1e-12 or not (kf in ONE_MODE_INDICES or (2 * kf).denominator == 1):
        raise InvalidBargmannIndex(f"Bargmann index k={k} must be 1/4, 3/4 or a positive half-integer")
    return kf


def check_couplings(p: List[float]) -> None:
    if any(abs(x) == 0 for x in p):
        raise ZeroCoupling(f"all couplings p_i must be nonzero, got {p}")


def check_slopes(r: List[float], nonzero: bool = False) -> None:
    if len(set(r)) != len(r):
        raise DuplicateSlope(f"slopes r_i must be mutually distinct, got {r}")
    if nonzero and any(x == 0 for x in r):
        raise ZeroSlopeEntry(f"slopes r_i must be nonzero, got {r}")


def check_cutoff(cutoff: int) -> None:
    if cutoff < MIN_CUTOFF:
        raise CutoffTooSmall(f"cutoff={cutoff} must be at least {MIN_CUTOFF}")


class ModelSpec(BaseModel):
    """Tagged parameter record for every named model."""

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    kind: ModelKind
    p: List[float] = []
    a: List[float] = []
    b: float = 0.0
    r: List[float] = []
    epsilon: float = 0.0
    g: float = 0.0
    g_o: float = 0.0
    g_lc: float = 0.0
    g_tilde: float = 0.0
    j: float = 0.5
    k: float = 0.5
    cutoff: int = 60
    n_min: int = -30
    n_max: int = 30
    coupling_phases: Optional[List[float]] = None

    @model_validator(mode="after")
    def _validate_kind(self) -> "ModelSpec":
        kind = self.kind
        if kind in BORDERED_KINDS:
            check_couplings(self.p)
            if self.coupling_phases is not None and len(self.coupling_phases) != len(self.p):
                raise ParameterError("coupling_phases must have one entry per coupling")
        if kind == ModelKind.EQUAL_SLOPE:
            if len(self.a) != len(self.p) or not self.p:
                raise ParameterError("equal slope needs len(p) == len(a) >= 1")
            if self.b == 0:
                raise ZeroSlope("equal slope needs b != 0")
        elif kind == ModelKind.BOW_TIE:
            if len(self.r) != len(self.p) or not self.p:
                raise ParameterError("bow-tie needs len(p) == len(r) >= 1")
            check_slopes(self.r)
        elif kind == ModelKind.GENERALIZED_BOW_TIE:
            if len(self.r) != len(self.p) or not self.p:
                raise ParameterError("generalized bow-tie needs len(p) == len(r) >= 1")
            check_slopes(self.r, nonzero=True)
        elif kind == ModelKind.SU2_SPIN:
            check_spin(self.j)
        elif kind == ModelKind.OSCILLATOR:
            check_cutoff(self.cutoff)
        elif kind == ModelKind.LINEAR_CHAIN:
            if self.n_max - self.n_min < MIN_CUTOFF:
                raise WindowTooSmall(f"chain window [{self.n_min}, {self.n_max}] is narrower than {MIN_CUTOFF}")
        elif kind == ModelKind.SU11_SECTOR:
            check_bargmann_index(self.k)
            check_cutoff(self.cutoff)
        return self

    @property
    def dim(self) -> int:
        if self.kind in (ModelKind.EQUAL_SLOPE, ModelKind.BOW_TIE):
            return len(self.p) + 1
        if self.kind == ModelKind.GENERALIZED_BOW_TIE:
            return len(self.p) + 2
        if self.kind == ModelKind.SU2_SPIN:
            return int(round(2 * self.j)) + 1
        if self.kind == ModelKind.LINEAR_CHAIN:
            return self.n_max - self.n_min + 1
        return self.cutoff + 1

    def with_cutoff(self, cutoff: int) -> "ModelSpec":
        """Copy with a new truncation; for the chain ``cutoff`` is the half-width of a window centred on 0."""
        if self.kind == ModelKind.LINEAR_CHAIN:
            return self.model_copy(update={"n_min": -cutoff, "n_max": cutoff})
        if self.kind not in TRUNCATED_KINDS:
            raise ParameterError(f"{self.kind.value} is finite and has no cutoff")
        check_cutoff(cutoff)
        return self.model_copy(update={"cutoff": cutoff})

    def to_json(self) -> str:
        return self.model_dump_json(exclude_defaults=False)

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.model_validate_json(text)

"""Secular (characteristic) equations of the bordered models, solved by pole bracketing.

Every supported equation has the form

    E - shift = sum_k w_k / (E - P_k),   w_k > 0,

so f(E) = E - shift - sum_k w_k/(E - P_k) is strictly increasing between
consecutive poles and has exactly one root in each of the m+1 intervals cut
by m distinct poles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from src.models.specs import ModelKind, ModelSpec
from src.utils.error_handling import DegeneratePoles, ParameterError, RootBracketFailure

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-15
ROOT_RTOL = 1e-14
MAX_SHRINK = 200
MAX_WIDEN = 200


class SecularKind(str, Enum):
    EQUAL_SLOPE_X = "EqualSlopeX"
    BOW_TIE_E = "BowTieE"
    GBT_E = "GbtE"


@dataclass(frozen=True)
class SecularSpec:
    """Parameters of one secular equation.

    For EqualSlopeX ``poles`` are the fixed offsets a_i and the equation reads
    E - slope*u = sum p_i^2/(E - a_i); at u = 0 it is the embedding equation
    for x. For BowTieE and GbtE ``poles`` are the slopes r_k and the actual
    poles sit at u*r_k; GbtE adds ``extra`` = eps^2/4 on a pole at E = 0.
    """

    kind: SecularKind
    poles: Tuple[float, ...]
    weights: Tuple[float, ...]
    extra: float = 0.0
    slope: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SecularKind(self.kind))
        object.__setattr__(self, "poles", tuple(float(x) for x in self.poles))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.poles) != len(self.weights):
            raise ParameterError("poles and weights must have equal length")
        if any(w <= 0 for w in self.weights) or self.extra < 0:
            raise ParameterError("secular weights must be positive")
        if self.kind == SecularKind.GBT_E and any(r == 0 for r in self.poles):
            raise ParameterError("generalized bow-tie poles must be nonzero")

    @property
    def size(self) -> int:
        """Number of roots, which equals the Hamiltonian dimension."""
        extra_root = 1 if self.kind == SecularKind.GBT_E else 0
        return len(self.poles) + 1 + extra_root

    def effective(self, u: float) -> Tuple[np.ndarray, np.ndarray, float]:
        """(poles, weights, shift) of the equation at parameter u."""
        if self.kind == SecularKind.EQUAL_SLOPE_X:
            return np.asarray(self.poles), np.asarray(self.weights), self.slope * u
        poles = u * np.asarray(self.poles)
        weights = np.asarray(self.weights)
        if self.kind == SecularKind.GBT_E and self.extra > 0:
            poles = np.append(poles, 0.0)
            weights = np.append(weights, self.extra)
        return poles, weights, 0.0


def secular_function(E: float, poles: np.ndarray, weights: np.ndarray, shift: float = 0.0) -> float:
    return float(E - shift - np.sum(weights / (E - poles)))


def _solve_interval(f, lo: float, hi: float) -> float:
    return brentq(f, lo, hi, xtol=ROOT_XTOL * max(1.0, abs(lo), abs(hi)), rtol=ROOT_RTOL)


def _inner_bracket(f, left: float, right: float) -> Tuple[float, float]:
    delta = 0.25 * (right - left)
    for _ in range(MAX_SHRINK):
        lo, hi = left + delta, right - delta
        if lo > left and hi < right and f(lo) < 0 < f(hi):
            return lo, hi
        delta *= 0.5
    raise RootBracketFailure(f"no sign change between poles {left} and {right}")


def _outer_bracket(f, pole: float, bound: float, upward: bool) -> Tuple[float, float]:
    step = bound
    for _ in range(MAX_WIDEN):
        if upward:
            far = pole + step
            near = _shrink_towards(f, pole, far, sign=-1)
            if f(far) > 0:
                return near, far
        else:
            far = pole - step
            near = _shrink_towards(f, pole, far, sign=+1)
            if f(far) < 0:
                return far, near
        step *= 2.0
    raise RootBracketFailure(f"outer interval beyond pole {pole} never changes sign")


def _shrink_towards(f, pole: float, far: float, sign: int) -> float:
    """Point between pole and far where f has the pole-side sign."""
    delta = 0.25 * abs(far - pole)
    direction = 1.0 if far > pole else -1.0
    for _ in range(MAX_SHRINK):
        x = pole + direction * delta
        if x != pole and np.sign(f(x)) == sign:
            return x
        delta *= 0.5
    raise RootBracketFailure(f"cannot approach pole {pole} from the {'right' if direction > 0 else 'left'}")


def solve_secular(poles: np.ndarray, weights: np.ndarray, shift: float = 0.0) -> List[float]:
    """All real roots of E - shift = sum w_k/(E - P_k), ascending."""
    order = np.argsort(poles)
    poles = np.asarray(poles, dtype=float)[order]
    weights = np.asarray(weights, dtype=float)[order]
    if len(poles) == 0:
        return [float(shift)]
    gaps = np.diff(poles)
    if np.any(gaps <= 1e-14 * max(1.0, float(np.max(np.abs(poles))))):
        raise DegeneratePoles(f"poles {poles.tolist()} are not distinct")

    def f(E):
        return secular_function(E, poles, weights, shift)

    min_gap = float(np.min(gaps)) if len(gaps) else 1.0
    bound = float(np.max(np.abs(poles))) + abs(shift) + float(np.sum(weights)) / min(min_gap, 1.0) + 1.0

    brackets = [_outer_bracket(f, poles[0], bound, upward=False)]
    brackets += [_inner_bracket(f, poles[i], poles[i + 1]) for i in range(len(poles) - 1)]
    brackets.append(_outer_bracket(f, poles[-1], bound, upward=True))

    roots = [_solve_interval(f, lo, hi) for lo, hi in brackets]
    return sorted(float(x) for x in roots)


def char_roots(spec: SecularSpec, u: float) -> List[float]:
    """All real roots of the secular equation at parameter u, ascending.

    Raises DegeneratePoles when the poles coincide, which for the bow-tie
    equations happens at u = 0; use degeneracy_profile there.
    """
    if spec.kind != SecularKind.EQUAL_SLOPE_X and u == 0:
        raise DegeneratePoles("all poles u*r_k collapse at u = 0")
    poles, weights, shift = spec.effective(u)
    roots = solve_secular(poles, weights, shift)
    if spec.kind == SecularKind.GBT_E and spec.extra == 0:
        # eps = 0 splits off the antisymmetric pair state at E = 0
        roots = sorted(roots + [0.0])
    logger.debug(f"{spec.kind.value} at u={u}: {len(roots)} roots")
    return roots


def secular_spec_for(model: ModelSpec) -> SecularSpec:
    """SecularSpec of a bordered model in the diabatic basis of its builder.

    The split pair of the generalized bow-tie couples to state k through its
    symmetric combination with strength sqrt(2)*p_k, hence weights 2*p_k^2.
    """
    p2 = [abs(x) ** 2 for x in model.p]
    if model.kind == ModelKind.EQUAL_SLOPE:
        return SecularSpec(SecularKind.EQUAL_SLOPE_X, tuple(model.a), tuple(p2), slope=model.b)
    if model.kind == ModelKind.BOW_TIE:
        return SecularSpec(SecularKind.BOW_TIE_E, tuple(model.r), tuple(p2))
    if model.kind == ModelKind.GENERALIZED_BOW_TIE:
        return SecularSpec(
            SecularKind.GBT_E, tuple(model.r), tuple(2 * w for w in p2), extra=model.epsilon ** 2 / 4
        )
    raise ParameterError(f"{model.kind.value} has no secular equation")


@dataclass
class RootCheck:
    """Comparison of secular roots against a dense eigensolver."""

    u: float
    roots: List[float]
    eigenvalues: List[float]
    max_residual: float = field(init=False)

    def __post_init__(self):
        self.max_residual = float(np.max(np.abs(np.asarray(self.roots) - np.asarray(self.eigenvalues))))


def check_roots(spec: SecularSpec, pencil, u: float) -> RootCheck:
    eig = np.linalg.eigvalsh(pencil.at(u))
    return RootCheck(u=u, roots=char_roots(spec, u), eigenvalues=[float(e) for e in eig])

"""Convergence controls: horizon extrapolation and truncation studies."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.models.builders import build
from src.models.pencils import MatrixPencil
from src.models.specs import ModelKind, ModelSpec
from src.propagator.config import PropagationConfig
from src.propagator.integrator import TransitionMatrix, transition_matrix, transition_rows
from src.utils.error_handling import NonConvergentTail, ParameterError, ProbeOutsideCutoff
from src.utils.progress import ProgressTracker

logger = logging.getLogger(__name__)

TAIL_FLOOR = 1e-9
TAIL_MODEL_FACTOR = 2.0
PROBE_MARGIN = 2
CONVERGENCE_TOL = 1e-4


@dataclass
class HorizonStudy:
    horizons: List[float]
    matrices: List[TransitionMatrix]
    extrapolated: np.ndarray
    tail_estimate: float
    differences: List[float]
    converged: bool = True


def tail_bound(horizons: Sequence[float], differences: Sequence[float]) -> float:
    """Largest distance to the limit a smooth c/T tail allows given the last two horizons."""
    t_prev, t_last = horizons[-2], horizons[-1]
    return differences[-1] * t_prev / (t_last - t_prev)


def horizon_extrapolation(
    pencil: MatrixPencil,
    cfg: PropagationConfig,
    horizons: Sequence[float],
    threads: int = 1,
) -> HorizonStudy:
    """Extrapolate P entries polynomially in 1/T to 1/T = 0.

    Uses a fit of degree min(2, len(horizons) - 1); tail_estimate is
    max |P(T_max) - P_extrapolated|. Raises NonConvergentTail when the last
    successive difference exceeds the first. A tail estimate larger than
    TAIL_MODEL_FACTOR times ``tail_bound`` means the samples oscillate rather
    than follow a power law in 1/T (diabatic read-out does this), and the
    study is marked not converged.
    """
    horizons = [float(h) for h in horizons]
    if len(horizons) < 3 or any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise ParameterError("need at least three increasing horizons")

    matrices = [transition_matrix(pencil, cfg.model_copy(update={"horizon": h}), threads) for h in horizons]
    stack = np.array([m.P for m in matrices])
    differences = [float(np.max(np.abs(b - a))) for a, b in zip(stack, stack[1:])]
    if differences[-1] > max(differences[0], TAIL_FLOOR):
        raise NonConvergentTail(f"successive horizon differences grow: {differences}")

    x = 1.0 / np.asarray(horizons)
    degree = min(2, len(horizons) - 1)
    flat = stack.reshape(len(horizons), -1)
    coeffs = np.polyfit(x, flat, degree)
    extrapolated = np.clip(coeffs[-1].reshape(stack.shape[1:]), 0.0, 1.0)
    tail = float(np.max(np.abs(stack[-1] - extrapolated)))

    converged = tail <= TAIL_MODEL_FACTOR * tail_bound(horizons, differences) + TAIL_FLOOR
    last = matrices[-1]
    last.tail_estimate = tail
    last.converged = last.converged and converged
    if converged:
        logger.info(f"horizon extrapolation over {horizons}: tail estimate {tail:.2e}")
    else:
        logger.warning(
            f"horizon extrapolation over {horizons} ({cfg.asymptotic_basis.value} basis): tail estimate {tail:.2e} "
            f"exceeds the 1/T tail bound {tail_bound(horizons, differences):.2e}, samples oscillate"
        )
    return HorizonStudy(horizons, matrices, extrapolated, tail, differences, converged)


def basis_position(spec: ModelSpec, label: int) -> int:
    """Row index of a physical state label in the truncated basis of ``spec``.

    Oscillator: Fock number n; SU(1,1) sector: n with mu = k + n; chain: site n.
    """
    if spec.kind in (ModelKind.OSCILLATOR, ModelKind.SU11_SECTOR):
        pos, edge = label, spec.cutoff
    elif spec.kind == ModelKind.LINEAR_CHAIN:
        pos, edge = label - spec.n_min, spec.n_max - spec.n_min
        if label - spec.n_min < PROBE_MARGIN:
            raise ProbeOutsideCutoff(f"site {label} lies within {PROBE_MARGIN} of the window edge")
    else:
        raise ParameterError(f"{spec.kind.value} has no truncation")
    if pos < 0 or pos > edge - PROBE_MARGIN:
        raise ProbeOutsideCutoff(f"state {label} lies within {PROBE_MARGIN} of the cutoff {edge}")
    return pos


@dataclass
class ConvergenceTable:
    cutoffs: List[int]
    probes: List[Tuple[int, int]]
    values: np.ndarray  # values[c, k] = P for probe k at cutoff c
    differences: np.ndarray  # |values[c+1] - values[c]|
    converged: bool
    tol: float

    @property
    def limit(self) -> np.ndarray:
        return self.values[-1]

    def to_rows(self) -> List[Dict]:
        rows = []
        for c, cutoff in enumerate(self.cutoffs):
            for k, (i, j) in enumerate(self.probes):
                rows.append({
                    "cutoff": cutoff,
                    "from": i,
                    "to": j,
                    "probability": float(self.values[c, k]),
                    "difference": float(self.differences[c - 1, k]) if c > 0 else None,
                })
        return rows


def cutoff_convergence(
    spec: ModelSpec,
    cutoffs: Sequence[int],
    probes: Sequence[Tuple[int, int]],
    cfg: PropagationConfig,
    threads: int = 1,
    tol: float = CONVERGENCE_TOL,
) -> ConvergenceTable:
    """P[i][j] for each probe at each cutoff; converged when the last difference is <= tol.

    For the chain a cutoff c is the window [-c, c].
    """
    cutoffs = [int(c) for c in cutoffs]
    if len(cutoffs) < 3 or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ParameterError("need at least three increasing cutoffs")
    probes = [(int(i), int(j)) for i, j in probes]
    specs = [spec.with_cutoff(c) for c in cutoffs]
    for s in specs[:1]:
        for i, j in probes:
            basis_position(s, i)
            basis_position(s, j)

    tracker = ProgressTracker(f"cutoff convergence {spec.kind.value}", len(cutoffs))

    def run(s: ModelSpec) -> np.ndarray:
        starts = sorted({basis_position(s, i) for i, _ in probes})
        rows = transition_rows(build(s), cfg, starts)
        lookup = dict(zip(starts, rows))
        tracker.update()
        return np.array([lookup[basis_position(s, i)][basis_position(s, j)] for i, j in probes])

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        values = np.array(list(pool.map(run, specs)))
    tracker.finish()

    differences = np.abs(np.diff(values, axis=0))
    converged = bool(np.all(differences[-1] <= tol))
    if not converged:
        logger.warning(
            f"{spec.kind.value}: cutoff study not converged, last difference {float(np.max(differences[-1])):.2e}"
        )
    return ConvergenceTable(cutoffs, probes, values, differences, converged, tol)

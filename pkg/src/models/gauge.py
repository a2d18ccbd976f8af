"""Removal of coupling phases by a diagonal unitary."""

from __future__ import annotations

import logging
from typing import Tuple, Union

import numpy as np

from src.models.pencils import GaugePhases, MatrixPencil
from src.models.specs import ModelKind
from src.utils.error_handling import NotGaugeable

logger = logging.getLogger(__name__)

PATTERN_TOL = 1e-14
REALITY_TOL = 1e-12


def _offdiag_mask(pencil: MatrixPencil) -> np.ndarray:
    mask = np.zeros((pencil.dim, pencil.dim), dtype=bool)
    for c in pencil.coeffs:
        mask |= np.abs(c) > PATTERN_TOL * max(1.0, np.linalg.norm(c))
    np.fill_diagonal(mask, False)
    return mask


def _bordered_phases(pencil: MatrixPencil, hubs: Tuple[int, ...]) -> np.ndarray:
    n = pencil.dim
    mask = _offdiag_mask(pencil)
    allowed = np.zeros_like(mask)
    for h in hubs:
        allowed[h, len(hubs):] = allowed[len(hubs):, h] = True
    if np.any(mask & ~allowed):
        raise NotGaugeable("nonzero entries outside the coupling border")
    if pencil.degree >= 1 and np.any(_offdiag_mask(MatrixPencil(pencil.coeffs[1:]))):
        raise NotGaugeable("slope matrix must be diagonal")

    c0 = pencil.coeffs[0]
    theta = np.zeros(n)
    # p_k = |p_k| exp(-i theta_k)
    theta[len(hubs):] = -np.angle(c0[hubs[0], len(hubs):])
    return theta


def _chain_phases(pencil: MatrixPencil) -> np.ndarray:
    mask = _offdiag_mask(pencil)
    if np.any(np.triu(mask, k=2)):
        raise NotGaugeable("only nearest-neighbour couplings can be gauged along a chain")
    c0 = pencil.coeffs[0]
    theta = np.zeros(pencil.dim)
    for k in range(pencil.dim - 1):
        theta[k + 1] = theta[k] - (np.angle(c0[k, k + 1]) if mask[k, k + 1] else 0.0)
    return theta


def degauge(pencil: MatrixPencil, kind: Union[ModelKind, str]) -> Tuple[MatrixPencil, GaugePhases]:
    """Return the real-symmetric pencil U^dagger H U and the phases of U.

    Phase conventions: theta_1 = 0 for the singly bordered models,
    theta_1 = theta_2 = 0 for the generalized bow-tie. Raises NotGaugeable
    when the nonzero pattern does not fit ``kind`` or phases remain.
    """
    kind = ModelKind(kind)
    if pencil.is_real():
        return MatrixPencil(tuple(c.real for c in pencil.coeffs), pencil.labels), GaugePhases(tuple([0.0] * pencil.dim))

    if kind in (ModelKind.EQUAL_SLOPE, ModelKind.BOW_TIE):
        theta = _bordered_phases(pencil, (0,))
    elif kind == ModelKind.GENERALIZED_BOW_TIE:
        theta = _bordered_phases(pencil, (0, 1))
    else:
        theta = _chain_phases(pencil)

    phases = GaugePhases(tuple(float(t) for t in theta))
    gauged = phases.apply(pencil)
    if not gauged.is_real(REALITY_TOL):
        raise NotGaugeable(f"{kind.value}: coupling phases cannot be removed by a diagonal unitary")
    logger.debug(f"degauged {kind.value} pencil of size {pencil.dim}")
    return MatrixPencil(tuple(c.real for c in gauged.coeffs), pencil.labels), phases

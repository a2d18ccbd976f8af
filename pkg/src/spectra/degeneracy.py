"""Eigenvalue clustering and level-crossing scans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.models.pencils import MatrixPencil

DEFAULT_RELATIVE_TOL = 1e-9


def degeneracy_profile(pencil: MatrixPencil, u: float, tol: Optional[float] = None) -> List[Tuple[float, int]]:
    """Cluster the eigenvalues of H(u) and return (eigenvalue, multiplicity) pairs, ascending.

    Neighbouring eigenvalues closer than ``tol`` share a cluster; the default
    is 1e-9 * max(||H(u)||, 1).
    """
    h = pencil.at(u)
    if tol is None:
        tol = DEFAULT_RELATIVE_TOL * max(float(np.linalg.norm(h)), 1.0)
    eig = np.linalg.eigvalsh(h)

    clusters: List[List[float]] = [[float(eig[0])]]
    for e in eig[1:]:
        if e - clusters[-1][-1] <= tol:
            clusters[-1].append(float(e))
        else:
            clusters.append([float(e)])
    return [(float(np.mean(c)), len(c)) for c in clusters]


def multiplicity_of(profile: Sequence[Tuple[float, int]], value: float, tol: float = 1e-8) -> int:
    for e, m in profile:
        if abs(e - value) <= tol:
            return m
    return 0


@dataclass
class CrossingScan:
    u_grid: np.ndarray
    gaps: np.ndarray  # smallest adjacent eigenvalue spacing at each u
    u_min: float
    min_gap: float


def level_crossing_scan(pencil: MatrixPencil, u_grid: Sequence[float]) -> CrossingScan:
    """Smallest adjacent eigenvalue gap along ``u_grid`` and where it occurs."""
    grid = np.asarray(u_grid, dtype=float)
    gaps = np.empty(len(grid))
    for idx, u in enumerate(grid):
        eig = np.linalg.eigvalsh(pencil.at(u))
        gaps[idx] = np.min(np.diff(eig)) if len(eig) > 1 else np.inf
    best = int(np.argmin(gaps))
    return CrossingScan(u_grid=grid, gaps=gaps, u_min=float(grid[best]), min_gap=float(gaps[best]))

"""Time-dependent Schroedinger propagation i dpsi/dt = H(t) psi for linear pencils."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import linear_sum_assignment

from src.models.pencils import MatrixPencil
from src.propagator.config import AsymptoticBasis, PropagationConfig
from src.utils.error_handling import (
    ParameterError,
    ReportValidationError,
    StepLimitExceeded,
    ToleranceUnreachable,
)
from src.utils.progress import ProgressTracker

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
EVALS_PER_STEP = 13
WEAK_OVERLAP = 0.5
SHORT_HORIZON_FRACTION = 0.75


class _StepBudgetExhausted(Exception):
    pass


class _Rhs:
    """Right-hand side of the (optionally phase-stripped) equations.

    Phase stripping integrates b_n = exp(i phi_n) psi_n with
    phi_n = C0[n,n] t + C1[n,n] t^2/2, so only off-diagonal couplings remain:
    i db_n/dt = sum_{m != n} H_nm(t) exp(i(phi_n - phi_m)) b_m.
    """

    def __init__(self, pencil: MatrixPencil, cfg: PropagationConfig):
        c0, c1 = pencil.padded(1).coeffs[:2]
        self.n = pencil.dim
        self.stripped = cfg.phase_stripping
        self.c0, self.c1 = c0, c1
        self.d0, self.d1 = np.real(np.diag(c0)).copy(), np.real(np.diag(c1)).copy()
        mask = (np.abs(c0) > 0) | (np.abs(c1) > 0)
        np.fill_diagonal(mask, False)
        self.rows, self.cols = np.nonzero(mask)
        self.o0, self.o1 = c0[self.rows, self.cols], c1[self.rows, self.cols]
        self.budget = EVALS_PER_STEP * cfg.max_steps
        self.evaluations = 0

    def phases(self, t: float) -> np.ndarray:
        return self.d0 * t + 0.5 * self.d1 * t * t

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        if self.evaluations > self.budget:
            raise _StepBudgetExhausted()
        if not self.stripped:
            return -1j * ((self.c0 + t * self.c1) @ y)
        phi = self.phases(t)
        vals = (self.o0 + t * self.o1) * np.exp(1j * (phi[self.rows] - phi[self.cols])) * y[self.cols]
        out = np.bincount(self.rows, weights=vals.real, minlength=self.n) + 1j * np.bincount(
            self.rows, weights=vals.imag, minlength=self.n
        )
        return -1j * out


def propagate(
    pencil: MatrixPencil,
    psi0: np.ndarray,
    t0: float,
    t1: float,
    cfg: PropagationConfig,
) -> np.ndarray:
    """psi(t1) for psi(t0) = psi0 under H(t) = C0 + t C1."""
    if pencil.degree > 1:
        raise ParameterError("propagation needs a pencil of degree <= 1")
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (pencil.dim,):
        raise ParameterError(f"initial state has shape {psi0.shape}, expected ({pencil.dim},)")
    if abs(np.linalg.norm(psi0) - 1.0) > NORM_TOL:
        raise ParameterError("initial state must be normalized")

    rhs = _Rhs(pencil, cfg)
    y0 = np.exp(1j * rhs.phases(t0)) * psi0 if rhs.stripped else psi0
    try:
        sol = solve_ivp(rhs, (t0, t1), y0, method=cfg.method, rtol=cfg.rel_tol, atol=cfg.abs_tol)
    except _StepBudgetExhausted:
        raise StepLimitExceeded(f"more than {cfg.max_steps} steps between t={t0} and t={t1}") from None
    if not sol.success:
        raise ToleranceUnreachable(f"integrator stopped: {sol.message}")

    y = sol.y[:, -1]
    psi = np.exp(-1j * rhs.phases(t1)) * y if rhs.stripped else y
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > 10 * cfg.rel_tol:
        logger.warning(f"norm drift {drift:.2e} exceeds 10*rel_tol over [{t0}, {t1}] (N={pencil.dim})")
    logger.debug(f"propagated N={pencil.dim} over [{t0}, {t1}] in {rhs.evaluations} evaluations")
    return psi


@dataclass
class TransitionMatrix:
    """P[i, j]: probability of ending in diabatic state j having started in i."""

    P: np.ndarray
    labels: List[str] = field(default_factory=list)
    row_defect: float = field(init=False)
    col_defect: float = field(init=False)
    tail_estimate: Optional[float] = None
    converged: bool = True

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=float)
        if not np.all(np.isfinite(self.P)):
            raise ReportValidationError("transition matrix has non-finite entries")
        if not self.labels:
            self.labels = [str(i) for i in range(1, self.P.shape[1] + 1)]
        self.row_defect = float(np.max(np.abs(self.P.sum(axis=1) - 1.0)))
        self.col_defect = float(np.max(np.abs(self.P.sum(axis=0) - 1.0))) if self.P.shape[0] == self.P.shape[1] else float("nan")

    @property
    def dim(self) -> int:
        return self.P.shape[1]

    def is_doubly_stochastic(self, tol: float = 1e-6) -> bool:
        return self.row_defect <= tol and self.col_defect <= tol and bool(np.all(self.P >= -tol))

    def to_dict(self) -> Dict:
        return {
            "labels": self.labels,
            "P": self.P.tolist(),
            "row_defect": self.row_defect,
            "col_defect": self.col_defect,
            "tail_estimate": self.tail_estimate,
            "converged": self.converged,
        }


def asymptotic_states(pencil: MatrixPencil, t: float) -> np.ndarray:
    """Eigenvectors of H(t) as columns, permuted so column n carries diabatic label n."""
    _, vecs = np.linalg.eigh(pencil.at(t))
    overlap = np.abs(vecs) ** 2
    rows, cols = linear_sum_assignment(-overlap)
    ordered = np.empty_like(vecs)
    ordered[:, rows] = vecs[:, cols]
    weakest = float(np.min(overlap[rows, cols]))
    if weakest < WEAK_OVERLAP:
        logger.warning(f"adiabatic states at t={t} overlap their diabatic labels only down to {weakest:.3f}")
    return ordered


def transition_rows(
    pencil: MatrixPencil,
    cfg: PropagationConfig,
    initial: Optional[Sequence[int]] = None,
    threads: int = 1,
) -> np.ndarray:
    """Rows P[i, :] for the requested initial states, one propagation each."""
    n = pencil.dim
    initial = list(range(n)) if initial is None else list(initial)
    t0, t1 = -cfg.horizon, cfg.horizon
    if cfg.asymptotic_basis == AsymptoticBasis.ADIABATIC:
        start, end = asymptotic_states(pencil, t0), asymptotic_states(pencil, t1)
    else:
        start = end = np.eye(n, dtype=complex)

    tracker = ProgressTracker(f"propagation N={n}", len(initial))

    def run(i: int) -> np.ndarray:
        psi = propagate(pencil, start[:, i], t0, t1, cfg)
        tracker.update()
        return np.abs(end.conj().T @ psi) ** 2

    if threads > 1 and len(initial) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, initial))
    else:
        rows = [run(i) for i in initial]
    tracker.finish()
    return np.array(rows)


def degenerate_slope_pairs(pencil: MatrixPencil) -> List[tuple]:
    """Index pairs (i, j), i < j, with equal diagonal entries of C_1."""
    slopes = np.real(np.diag(pencil.padded(1).coeffs[1]))
    n = len(slopes)
    return [(i, j) for i in range(n) for j in range(i + 1, n) if slopes[i] == slopes[j]]


def transition_matrix(pencil: MatrixPencil, cfg: PropagationConfig, threads: int = 1) -> TransitionMatrix:
    """Propagate every basis state from -T to +T; columns run concurrently.

    With equal diabatic slopes the result is marked not converged and carries
    tail_estimate = max |P(T) - P(SHORT_HORIZON_FRACTION * T)|.
    """
    tm = TransitionMatrix(transition_rows(pencil, cfg, threads=threads), labels=pencil.state_labels)
    pairs = degenerate_slope_pairs(pencil)
    if pairs:
        short = cfg.model_copy(update={"horizon": SHORT_HORIZON_FRACTION * cfg.horizon})
        tm.tail_estimate = float(np.max(np.abs(tm.P - transition_rows(pencil, short, threads=threads))))
        tm.converged = False
        logger.warning(
            f"{len(pairs)} equal-slope pair(s): probabilities keep finite-horizon tails, "
            f"estimate {tm.tail_estimate:.2e} at T={cfg.horizon}"
        )
    if tm.row_defect > 1e-6 or tm.col_defect > 1e-6:
        logger.warning(f"unitarity defects row={tm.row_defect:.2e} col={tm.col_defect:.2e} (N={tm.dim})")
    return tm

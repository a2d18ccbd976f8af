"""Numerical checks of commutation, triviality and symmetry.

All linear-algebra decisions (rank, nullspace) use singular values relative
to the largest one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from src.models.pencils import MatrixPencil, identity_pencil
from src.utils.error_handling import DimensionMismatch, NotACommutingPartner, ParameterError

logger = logging.getLogger(__name__)

TRIVIALITY_TOL = 1e-8
COMMUTATOR_PRECONDITION_TOL = 1e-8
RANK_TOL = 1e-9
FIT_HALF_WIDTH = 3.0


def sample_u(count: int, seed: int = 0, low: float = -5.0, high: float = 5.0) -> np.ndarray:
    """Reproducible uniform parameter samples."""
    return np.random.default_rng(seed).uniform(low, high, size=count)


def commutator_norm(a: MatrixPencil, b: MatrixPencil, u_samples: Sequence[float]) -> float:
    """max_u ||[A(u), B(u)]||_F / max(1, ||A(u)||_F ||B(u)||_F)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"pencils of size {a.dim} and {b.dim}")
    worst = 0.0
    for u in u_samples:
        am, bm = a.at(u), b.at(u)
        comm = np.linalg.norm(am @ bm - bm @ am)
        worst = max(worst, float(comm / max(1.0, np.linalg.norm(am) * np.linalg.norm(bm))))
    return worst


class Verdict(str, Enum):
    TRIVIAL = "Trivial"
    NONTRIVIAL = "Nontrivial"


@dataclass
class TrivialityReport:
    residual: float
    coefficients: np.ndarray  # coefficients[k, q] multiplies u^q H^k
    verdict: Verdict

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "coefficients": self.coefficients.tolist(),
            "verdict": self.verdict.value,
        }


def chebyshev_points(count: int, half_width: float = FIT_HALF_WIDTH) -> np.ndarray:
    k = np.arange(count)
    return half_width * np.cos((2 * k + 1) * np.pi / (2 * count))


def _stack(m: np.ndarray) -> np.ndarray:
    flat = np.asarray(m).ravel()
    return np.concatenate([flat.real, flat.imag])


def triviality_residual(
    partner: MatrixPencil,
    hamiltonian: MatrixPencil,
    tol: float = TRIVIALITY_TOL,
    commutator_tol: float = COMMUTATOR_PRECONDITION_TOL,
) -> TrivialityReport:
    """Least-squares fit of I(u) by sum_{k<=p} c_k(u) H(u)^k with deg c_k <= p - k.

    The residual is the fit error over ||I|| on 2p+5 Chebyshev points in
    [-3, 3]; the verdict is Trivial when it does not exceed ``tol``.
    """
    p = partner.degree
    grid = chebyshev_points(2 * p + 5)
    if commutator_norm(partner, hamiltonian, grid) > commutator_tol:
        raise NotACommutingPartner("partner does not commute with the Hamiltonian")

    terms = [(k, q) for k in range(p + 1) for q in range(p - k + 1)]
    rows, target = [], []
    for u in grid:
        h = hamiltonian.at(u)
        powers = [np.eye(hamiltonian.dim, dtype=complex)]
        for _ in range(p):
            powers.append(powers[-1] @ h)
        rows.append(np.column_stack([_stack(u ** q * powers[k]) for k, q in terms]))
        target.append(_stack(partner.at(u)))
    design = np.vstack(rows)
    rhs = np.concatenate(target)

    norm_rhs = float(np.linalg.norm(rhs))
    coefficients = np.zeros((p + 1, p + 1))
    if norm_rhs == 0.0:
        return TrivialityReport(0.0, coefficients, Verdict.TRIVIAL)

    scale = np.linalg.norm(design, axis=0)
    scale[scale == 0] = 1.0
    solution, *_ = np.linalg.lstsq(design / scale, rhs, rcond=None)
    solution = solution / scale
    residual = min(1.0, float(np.linalg.norm(design @ solution - rhs)) / norm_rhs)

    for (k, q), c in zip(terms, solution):
        coefficients[k, q] = c
    verdict = Verdict.TRIVIAL if residual <= tol else Verdict.NONTRIVIAL
    logger.debug(f"triviality fit of degree-{p} partner: residual {residual:.3e} ({verdict.value})")
    return TrivialityReport(residual, coefficients, verdict)


def hermitian_basis(n: int) -> np.ndarray:
    """Real basis of n x n Hermitian matrices: E_ii, E_ij + E_ji, i(E_ij - E_ji)."""
    basis = []
    for i in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[i, i] = 1.0
        basis.append(m)
    for i in range(n):
        for j in range(i + 1, n):
            sym = np.zeros((n, n), dtype=complex)
            sym[i, j] = sym[j, i] = 1.0
            anti = np.zeros((n, n), dtype=complex)
            anti[i, j], anti[j, i] = 1j, -1j
            basis.extend([sym, anti])
    return np.array(basis)


def _commutator_columns(c: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Columns vec([C, B_b]) for every basis element, real and imaginary parts stacked."""
    comm = np.einsum("ij,bjk->bik", c, basis) - np.einsum("bij,jk->bik", basis, c)
    flat = comm.reshape(len(basis), -1)
    return np.concatenate([flat.real, flat.imag], axis=1).T


def _numerical_rank(m: np.ndarray, rank_tol: float) -> int:
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if len(sv) == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv >= rank_tol * sv[0]))


def shared_symmetry_dim(pencils: Sequence[MatrixPencil], rank_tol: float = RANK_TOL) -> int:
    """Dimension of the space of constant Hermitian Omega commuting with every coefficient.

    1 means only multiples of the identity.
    """
    n = pencils[0].dim
    if any(pc.dim != n for pc in pencils):
        raise DimensionMismatch("all pencils must share one dimension")
    basis = hermitian_basis(n)
    blocks = [_commutator_columns(c, basis) for pc in pencils for c in pc.coeffs]
    return n * n - _numerical_rank(np.vstack(blocks), rank_tol)


def partner_space(hamiltonian: MatrixPencil, degree: int, rank_tol: float = RANK_TOL) -> List[MatrixPencil]:
    """Basis of Hermitian pencils D(u) of degree <= ``degree`` with [H(u), D(u)] = 0 for all u."""
    if degree < 0:
        raise ParameterError("degree must be non-negative")
    n = hamiltonian.dim
    basis = hermitian_basis(n)
    nb = len(basis)
    block_rows = 2 * n * n
    orders = hamiltonian.degree + degree + 1
    system = np.zeros((orders * block_rows, (degree + 1) * nb))
    for s in range(degree + 1):
        for a, c in enumerate(hamiltonian.coeffs):
            m = a + s
            system[m * block_rows:(m + 1) * block_rows, s * nb:(s + 1) * nb] += _commutator_columns(c, basis)

    kernel = null_space(system, rcond=rank_tol)
    partners = []
    for vec in kernel.T:
        coeffs = tuple(np.tensordot(vec[s * nb:(s + 1) * nb], basis, axes=1) for s in range(degree + 1))
        partners.append(MatrixPencil(coeffs))
    logger.debug(f"partner space of degree {degree} for N={n}: dimension {len(partners)}")
    return partners


def trivial_span(hamiltonian: MatrixPencil, degree: int) -> List[MatrixPencil]:
    """u^a H^b for a + b <= degree."""
    powers = [identity_pencil(hamiltonian.dim)]
    for _ in range(degree):
        powers.append(powers[-1].matmul(hamiltonian))
    return [powers[b].shift_degree(a) for b in range(degree + 1) for a in range(degree - b + 1)]


def family_span_dim(members: Sequence[MatrixPencil], extra: Sequence[MatrixPencil] = (), rank_tol: float = RANK_TOL) -> int:
    """Numerical rank of a set of pencils viewed as vectors."""
    pencils = list(members) + list(extra)
    if not pencils:
        return 0
    top = max(pc.degree for pc in pencils)
    vectors = [np.concatenate([_stack(c) for c in pc.padded(top).coeffs]) for pc in pencils]
    return _numerical_rank(np.array(vectors), rank_tol)


def nontrivial_partner_count(hamiltonian: MatrixPencil, degree: int) -> int:
    """dim(partner space) minus dim(span of u^a H^b, a + b <= degree)."""
    return len(partner_space(hamiltonian, degree)) - family_span_dim(trivial_span(hamiltonian, degree))


def maximal_family_member(hamiltonian: MatrixPencil) -> bool:
    """True when a linear pencil has the N - 2 nontrivial linear partners of a maximal family."""
    if hamiltonian.degree != 1:
        raise ParameterError("maximal linear families consist of degree-1 pencils")
    return nontrivial_partner_count(hamiltonian, 1) == hamiltonian.dim - 2

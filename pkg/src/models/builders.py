"""Constructors for every Hamiltonian pencil, in the diabatic basis.

Basis ordering: state 1 is the bordered level (equal slope, bow-tie); states
1 and 2 are the split pair (generalized bow-tie); Fock, chain-site and
SU(1,1) weight bases ascend.
"""

from __future__ import annotations

import logging
from typing import Sequence, Union

import numpy as np

from src.models.pencils import MatrixPencil
from src.models.specs import (
    ModelKind,
    ModelSpec,
    check_bargmann_index,
    check_couplings,
    check_cutoff,
    check_slopes,
    check_spin,
    MIN_CUTOFF,
)
from src.utils.error_handling import ParameterError, WindowTooSmall, ZeroDetuning, ZeroSlope

logger = logging.getLogger(__name__)

Coupling = Union[float, complex]


def _coupling_array(p: Sequence[Coupling]) -> np.ndarray:
    arr = np.asarray(p, dtype=complex)
    check_couplings(list(np.abs(arr)))
    return arr


def build_equal_slope(p: Sequence[Coupling], a: Sequence[float], b: float) -> MatrixPencil:
    p = _coupling_array(p)
    if len(a) != len(p):
        raise ParameterError(f"len(p)={len(p)} and len(a)={len(a)} differ")
    if b == 0:
        raise ZeroSlope("equal slope model needs b != 0")
    n = len(p) + 1
    c0 = np.zeros((n, n), dtype=complex)
    c0[0, 1:] = p
    c0[1:, 0] = p.conj()
    c0[np.arange(1, n), np.arange(1, n)] = a
    c1 = np.zeros((n, n))
    c1[0, 0] = b
    return MatrixPencil.linear(c0, c1)


def build_bowtie(p: Sequence[Coupling], r: Sequence[float]) -> MatrixPencil:
    p = _coupling_array(p)
    if len(r) != len(p):
        raise ParameterError(f"len(p)={len(p)} and len(r)={len(r)} differ")
    check_slopes(list(r))
    n = len(p) + 1
    c0 = np.zeros((n, n), dtype=complex)
    c0[0, 1:] = p
    c0[1:, 0] = p.conj()
    c1 = np.diag(np.concatenate([[0.0], np.asarray(r, dtype=float)]))
    return MatrixPencil.linear(c0, c1)


def build_generalized_bowtie(p: Sequence[Coupling], r: Sequence[float], epsilon: float) -> MatrixPencil:
    p = _coupling_array(p)
    if len(r) != len(p):
        raise ParameterError(f"len(p)={len(p)} and len(r)={len(r)} differ")
    check_slopes(list(r), nonzero=True)
    n = len(p) + 2
    c0 = np.zeros((n, n), dtype=complex)
    c0[0, 0] = epsilon / 2
    c0[1, 1] = -epsilon / 2
    for row in (0, 1):
        c0[row, 2:] = p
        c0[2:, row] = p.conj()
    c1 = np.diag(np.concatenate([[0.0, 0.0], np.asarray(r, dtype=float)]))
    return MatrixPencil.linear(c0, c1)


def spin_matrices(j: float) -> tuple:
    """(S_x, S_z) in the basis m = j, j-1, ..., -j."""
    jf = float(check_spin(j))
    m = jf - np.arange(int(round(2 * jf)) + 1)
    # <m+1|S_+|m> sits one row above m in this descending basis
    s_plus = np.diag(np.sqrt(jf * (jf + 1) - m[1:] * (m[1:] + 1)), k=1)
    s_x = 0.5 * (s_plus + s_plus.T)
    return s_x, np.diag(m)


def build_su2_spin(g: float, j: float) -> MatrixPencil:
    s_x, s_z = spin_matrices(j)
    labels = [_half_label(x) for x in np.diag(s_z)]
    return MatrixPencil.linear(g * s_x, s_z, labels)


def build_oscillator(g_o: float, cutoff: int) -> MatrixPencil:
    check_cutoff(cutoff)
    n = np.arange(cutoff + 1)
    c0 = g_o * (np.diag(np.sqrt(n[1:]), k=1) + np.diag(np.sqrt(n[1:]), k=-1))
    return MatrixPencil.linear(c0, np.diag(n.astype(float)), [str(x) for x in n])


def build_linear_chain(g_lc: float, n_min: int, n_max: int) -> MatrixPencil:
    if n_max - n_min < MIN_CUTOFF:
        raise WindowTooSmall(f"window [{n_min}, {n_max}] is narrower than {MIN_CUTOFF}")
    sites = np.arange(n_min, n_max + 1)
    hop = np.full(len(sites) - 1, g_lc, dtype=float)
    c0 = np.diag(hop, k=1) + np.diag(hop, k=-1)
    return MatrixPencil.linear(c0, np.diag(sites.astype(float)), [str(x) for x in sites])


def su11_ladder(k: float, cutoff: int) -> tuple:
    """(K_0, K_+) on |k, mu>, mu = k .. k + cutoff, truncated."""
    kf = float(check_bargmann_index(k))
    check_cutoff(cutoff)
    mu = kf + np.arange(cutoff + 1)
    k_plus = np.diag(np.sqrt((mu[:-1] + kf) * (mu[:-1] - kf + 1)), k=-1)
    return np.diag(mu), k_plus


def build_su11_sector(g_tilde: float, k: float, cutoff: int) -> MatrixPencil:
    k0, k_plus = su11_ladder(k, cutoff)
    labels = [_half_label(x) for x in np.diag(k0)]
    return MatrixPencil.linear(g_tilde * (k_plus + k_plus.T), k0, labels)


def build(spec: ModelSpec) -> MatrixPencil:
    """Build the pencil a ModelSpec describes; complex-phase couplings are degauged."""
    kind = spec.kind
    if kind in (ModelKind.EQUAL_SLOPE, ModelKind.BOW_TIE, ModelKind.GENERALIZED_BOW_TIE):
        p = np.asarray(spec.p, dtype=complex)
        if spec.coupling_phases is not None:
            p = p * np.exp(-1j * np.asarray(spec.coupling_phases))
        if kind == ModelKind.EQUAL_SLOPE:
            pencil = build_equal_slope(p, spec.a, spec.b)
        elif kind == ModelKind.BOW_TIE:
            pencil = build_bowtie(p, spec.r)
        else:
            pencil = build_generalized_bowtie(p, spec.r, spec.epsilon)
        if spec.coupling_phases is not None:
            from src.models.gauge import degauge
            pencil, phases = degauge(pencil, kind)
            logger.debug(f"{kind.value}: removed coupling phases {phases.theta}")
        return pencil
    if kind == ModelKind.SU2_SPIN:
        return build_su2_spin(spec.g, spec.j)
    if kind == ModelKind.OSCILLATOR:
        return build_oscillator(spec.g_o, spec.cutoff)
    if kind == ModelKind.LINEAR_CHAIN:
        return build_linear_chain(spec.g_lc, spec.n_min, spec.n_max)
    return build_su11_sector(spec.g_tilde, spec.k, spec.cutoff)


def require_detuning(epsilon: float) -> None:
    if epsilon == 0:
        raise ZeroDetuning("the generalized bow-tie partner divides by epsilon")


def _half_label(x: float) -> str:
    twice = int(round(2 * x))
    if twice % 2 == 0:
        return str(twice // 2)
    return f"{twice}/2"

"""Commuting families of the bordered models.

Indices in docstrings are 1-based, as in the matrix displays; arrays are 0-based.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.models.builders import build_bowtie, build_equal_slope, build_generalized_bowtie, require_detuning
from src.models.pencils import MatrixPencil
from src.models.specs import check_couplings, check_slopes
from src.spectra.secular import solve_secular
from src.utils.error_handling import DegenerateXi, DimensionMismatch, ParameterError, ZeroSlopeEntry

logger = logging.getLogger(__name__)


class Construction(str, Enum):
    MAXIMAL_LINEAR = "MaximalLinear"
    BOW_TIE_QUADRATIC = "BowTieQuadratic"
    GBT_MINIMAL = "GbtMinimal"


@dataclass(frozen=True)
class FamilyParams:
    """(gamma, xi, x) parametrization of a maximal linear family."""

    gamma: Tuple[float, ...]
    xi: Tuple[float, ...]
    x: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        object.__setattr__(self, "xi", tuple(float(e) for e in self.xi))
        if len(self.gamma) != len(self.xi):
            raise DimensionMismatch(f"{len(self.gamma)} gammas but {len(self.xi)} xis")
        if any(g == 0 for g in self.gamma):
            raise ParameterError("family parameters gamma_i must be nonzero")

    @property
    def size(self) -> int:
        return len(self.gamma)

    def to_dict(self) -> Dict[str, Any]:
        return {"gamma": list(self.gamma), "xi": list(self.xi), "x": self.x}


@dataclass
class CommutingFamily:
    members: List[MatrixPencil]
    labels: List[str]
    construction: Construction
    params: Dict[str, Any] = field(default_factory=dict)

    def member(self, label: str) -> MatrixPencil:
        return self.members[self.labels.index(label)]

    def max_pairwise_commutator(self, u_samples: Sequence[float]) -> float:
        from src.commutant.verification import commutator_norm

        worst = 0.0
        for a, b in combinations(self.members, 2):
            worst = max(worst, commutator_norm(a, b, u_samples))
        return worst

    def to_dict(self) -> Dict[str, Any]:
        return {
            "construction": self.construction.value,
            "params": self.params,
            "members": [{"label": l, **m.to_dict()} for l, m in zip(self.labels, self.members)],
        }


def maximal_linear_family(params: FamilyParams) -> CommutingFamily:
    """The N mutually commuting pencils

    H_i(u) = u|i><i| + sum_{j != i} [g_i g_j (|i><j| + |j><i|) - g_j^2 |i><i| - g_i^2 |j><j|] / (xi_i - xi_j).
    """
    n = params.size
    xi = np.asarray(params.xi)
    gamma = np.asarray(params.gamma)
    if len(np.unique(xi)) != n:
        raise DegenerateXi(f"xi values must be distinct, got {params.xi}")

    members = []
    for i in range(n):
        c0 = np.zeros((n, n))
        c1 = np.zeros((n, n))
        c1[i, i] = 1.0
        for j in range(n):
            if j == i:
                continue
            d = xi[i] - xi[j]
            c0[i, j] = c0[j, i] = gamma[i] * gamma[j] / d
            c0[i, i] -= gamma[j] ** 2 / d
            c0[j, j] -= gamma[i] ** 2 / d
        members.append(MatrixPencil.linear(c0, c1))
    return CommutingFamily(
        members=members,
        labels=[f"H_{i + 1}" for i in range(n)],
        construction=Construction.MAXIMAL_LINEAR,
        params=params.to_dict(),
    )


@dataclass
class Embedding:
    """Equal-slope model written as H(u) = H_1(b*u) + x*Id of a maximal family, one record per root x."""

    roots: List[float]
    params: List[FamilyParams]
    errors: List[float]

    @property
    def reconstruction_error(self) -> float:
        return max(self.errors)


def embed_equal_slope(p: Sequence[float], a: Sequence[float], b: float = 1.0) -> Embedding:
    """Solve x = sum p_i^2/(x - a_i) and map every root onto (gamma, xi).

    gamma_1 = 1, xi_1 = 0, gamma_i = p_i/(x - a_i), xi_i = 1/(a_i - x). The
    offsets a_i must be distinct (DegeneratePoles otherwise).
    """
    hamiltonian = build_equal_slope(p, a, b)
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    roots = solve_secular(a, p ** 2)

    params, errors = [], []
    for x in roots:
        fp = FamilyParams(
            gamma=(1.0, *(p / (x - a))),
            xi=(0.0, *(1.0 / (a - x))),
            x=x,
        )
        rebuilt = maximal_linear_family(fp).members[0].coeffs
        err = max(
            float(np.max(np.abs(rebuilt[0] + x * np.eye(hamiltonian.dim) - hamiltonian.coeffs[0]))),
            float(np.max(np.abs(b * rebuilt[1] - hamiltonian.coeffs[1]))),
        )
        params.append(fp)
        errors.append(err)
    logger.debug(f"equal slope embedding: {len(roots)} roots, worst error {max(errors):.2e}")
    return Embedding(roots=roots, params=params, errors=errors)


def _check_bowtie(p: Sequence[float], r: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    if len(p) != len(r):
        raise DimensionMismatch(f"len(p)={len(p)} and len(r)={len(r)} differ")
    check_couplings(list(p))
    check_slopes(list(r))
    if any(x == 0 for x in r):
        raise ZeroSlopeEntry(f"quadratic partners divide by r_i, got r={list(r)}")
    return np.asarray(p, dtype=float), np.asarray(r, dtype=float)


def bowtie_general_quadratic_partner(
    p: Sequence[float],
    r: Sequence[float],
    q: Sequence[float],
    t11: float = 0.0,
    t12: float = 0.0,
    v11: float = 0.0,
) -> MatrixPencil:
    """General quadratic commuting partner of the bow-tie model.

    Free parameters: t11 and v11 (identity multiples), t12 (multiple
    t12/p_2 of H) and the N diagonal entries q of the u^2 coefficient.
    """
    p, r = _check_bowtie(p, r)
    n = len(p) + 1
    q = np.asarray(q, dtype=float)
    if len(q) != n:
        raise DimensionMismatch(f"need {n} values q_kk, got {len(q)}")
    h = build_bowtie(p, r)
    dq = (q[1:] - q[0]) / r

    c2 = np.diag(q)
    c1 = v11 * np.eye(n)
    c1[0, 1:] += p * dq
    c1[1:, 0] += p * dq
    c0 = t11 * np.eye(n)
    for i in range(n - 1):
        for m in range(n - 1):
            if m == i:
                continue
            c0[i + 1, i + 1] -= p[m] ** 2 / (r[m] - r[i]) * (dq[m] - dq[i])
            if m > i:
                c0[i + 1, m + 1] = c0[m + 1, i + 1] = p[i] * p[m] / (r[i] - r[m]) * (dq[i] - dq[m])
    return MatrixPencil((c0, c1, c2)) + h * (t12 / p[0])


def bowtie_quadratic_family(p: Sequence[float], r: Sequence[float]) -> CommutingFamily:
    """The bow-tie Hamiltonian with its N quadratic partners I_1..I_N.

    I_1 takes q_11 = 1; I_k (k >= 2) takes q_kk = 1 and is scaled by r_k.
    Identities: sum_{k>=2} I_k = uH, sum_{k>=2} r_k I_k = H^2 - sum p^2 Id,
    I_1 + sum_{k>=2} I_k / r_k = u^2 Id.
    """
    p, r = _check_bowtie(p, r)
    n = len(p) + 1
    members = [build_bowtie(p, r)]
    for k in range(n):
        q = np.zeros(n)
        q[k] = 1.0
        partner = bowtie_general_quadratic_partner(p, r, q)
        members.append(partner if k == 0 else partner * r[k - 1])
    return CommutingFamily(
        members=members,
        labels=["H"] + [f"I_{k + 1}" for k in range(n)],
        construction=Construction.BOW_TIE_QUADRATIC,
        params={"p": p.tolist(), "r": r.tolist()},
    )


def general_gbt_partner(
    p: Sequence[float],
    r: Sequence[float],
    epsilon: float,
    t11: float = 0.0,
    v1: float = 0.0,
    v2: float = 1.0,
    v: float = 1.0,
) -> MatrixPencil:
    """Four-parameter linear commuting partner of the generalized bow-tie model.

    t11 adds identity multiples, v/2 multiples of H, (v1 + v2)/2 multiples of
    u*Id; v2 - v1 carries the single nontrivial direction.
    """
    require_detuning(epsilon)
    build_generalized_bowtie(p, r, epsilon)
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    n = len(p) + 2
    s = float(np.sum(p ** 2 / r))
    dv = v2 - v1

    c1 = np.diag(np.concatenate([[v1, v2], (v * r + v1 + v2) / 2]))
    c0 = np.zeros((n, n))
    c0[0, 0] = t11
    c0[1, 1] = t11 - v * epsilon / 2
    c0[0, 1] = c0[1, 0] = dv * s / epsilon
    c0[np.arange(2, n), np.arange(2, n)] = t11 - v * epsilon / 4 + dv * (s / epsilon - epsilon / (4 * r))
    c0[0, 2:] = c0[2:, 0] = p / (2 * r) * (v * r + dv)
    c0[1, 2:] = c0[2:, 1] = p / (2 * r) * (v * r - dv)
    return MatrixPencil.linear(c0, c1)


def gbt_linear_partner(p: Sequence[float], r: Sequence[float], epsilon: float) -> MatrixPencil:
    """Simplified nontrivial partner: v = v2 = 1, v1 = 0, shifted so the (1,1) entry is eps/2 - S/eps.

    I(u) = (eps/2 - S/eps)|1><1| + (u - S/eps)|2><2| + (S/eps)(|1><2| + |2><1|)
         + sum_i [u(r_i + 1)/2 + (eps/4)(1 - 1/r_i)] |i><i|
         + sum_i p_i/(2 r_i) [(r_i + 1)(|1><i| + h.c.) + (r_i - 1)(|2><i| + h.c.)],
    with S = sum_m p_m^2/r_m.
    """
    require_detuning(epsilon)
    s = float(np.sum(np.asarray(p, dtype=float) ** 2 / np.asarray(r, dtype=float)))
    return general_gbt_partner(p, r, epsilon, t11=epsilon / 2 - s / epsilon, v1=0.0, v2=1.0, v=1.0)


def gbt_minimal_family(p: Sequence[float], r: Sequence[float], epsilon: float) -> CommutingFamily:
    return CommutingFamily(
        members=[build_generalized_bowtie(p, r, epsilon), gbt_linear_partner(p, r, epsilon)],
        labels=["H", "I"],
        construction=Construction.GBT_MINIMAL,
        params={"p": list(map(float, p)), "r": list(map(float, r)), "epsilon": float(epsilon)},
    )


def bowtie_identity_residuals(family: CommutingFamily, u_samples: Sequence[float]) -> Dict[str, float]:
    """Largest entrywise error of the three linear relations among H, I_1..I_N over ``u_samples``."""
    if family.construction != Construction.BOW_TIE_QUADRATIC:
        raise ParameterError("identities hold for the bow-tie quadratic family only")
    p = np.asarray(family.params["p"])
    r = np.asarray(family.params["r"])
    h = family.member("H")
    n = h.dim
    eye = np.eye(n)
    out = {"sum_I": 0.0, "sum_rI": 0.0, "sum_I_over_r": 0.0}
    for u in u_samples:
        hu = h.at(u)
        rest = [family.member(f"I_{k + 2}").at(u) for k in range(n - 1)]
        i1 = family.member("I_1").at(u)
        out["sum_I"] = max(out["sum_I"], float(np.max(np.abs(sum(rest) - u * hu))))
        out["sum_rI"] = max(
            out["sum_rI"],
            float(np.max(np.abs(sum(rk * ik for rk, ik in zip(r, rest)) - (hu @ hu - np.sum(p ** 2) * eye)))),
        )
        out["sum_I_over_r"] = max(
            out["sum_I_over_r"],
            float(np.max(np.abs(i1 + sum(ik / rk for rk, ik in zip(r, rest)) - u * u * eye))),
        )
    return out

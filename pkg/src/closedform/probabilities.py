"""Closed-form transition probabilities of the SU(2) and SU(1,1) descendants.

Factorial and Gamma ratios are evaluated in log space, so spins and sector
indices up to ~10^3 stay finite.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from src.closedform.special import bessel_j, hyp2f1_terminating, laguerre_assoc
from src.models.specs import ModelKind, ModelSpec, check_bargmann_index, check_spin
from src.utils.error_handling import InvalidMagneticQuantum, InvalidSectorState, ParameterError

logger = logging.getLogger(__name__)

INDEX_TOL = 1e-9


@dataclass(frozen=True)
class EulerBeta:
    """q = cos^2(beta/2) of the rotation generated by the two-level evolution."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ParameterError(f"q must lie in (0, 1], got {self.q}")

    @classmethod
    def from_coupling(cls, g: float) -> "EulerBeta":
        return cls(lz2_survival(g))

    @property
    def beta(self) -> float:
        return 2.0 * math.acos(math.sqrt(self.q))


@dataclass(frozen=True)
class Su11Z:
    """z = 1 - exp(2 pi g~^2) <= 0."""

    z: float

    def __post_init__(self):
        if self.z > 0:
            raise ParameterError(f"z must be non-positive, got {self.z}")

    @classmethod
    def from_coupling(cls, g_tilde: float) -> "Su11Z":
        return cls(-math.expm1(2 * math.pi * g_tilde ** 2))


def lz2_survival(g: float) -> float:
    """Probability of staying in the initial diabatic state of gS_x + tS_z at j = 1/2."""
    return math.exp(-math.pi * g ** 2 / 2)


def _integer_offset(value: float, base: float) -> int:
    d = value - base
    if abs(d - round(d)) > INDEX_TOL:
        return -1
    return int(round(d))


def wigner_small_d_squared(j: float, m: float, m_prime: float, q: float) -> float:
    """|d^j_{m m'}(beta)|^2 with q = cos^2(beta/2).

    Sum over every s keeping all four factorial arguments non-negative:
    d = sum_s (-1)^s sqrt((j+m)!(j-m)!(j+m')!(j-m')!) / ((j+m-s)! s! (j-m'-s)! (m'-m+s)!)
        * cos^(2j+m-m'-2s) sin^(m'-m+2s).
    """
    jf = float(check_spin(j))
    jm, jmm = _integer_offset(jf, -m), _integer_offset(jf, m)
    jp, jmp = _integer_offset(jf, -m_prime), _integer_offset(jf, m_prime)
    if min(jm, jmm, jp, jmp) < 0:
        raise InvalidMagneticQuantum(f"m={m}, m'={m_prime} not allowed for j={j}")
    # jm = j+m, jmm = j-m, jp = j+m', jmp = j-m'
    delta = jp - jm  # m' - m
    root = 0.5 * (gammaln(jm + 1) + gammaln(jmm + 1) + gammaln(jp + 1) + gammaln(jmp + 1))

    s_lo, s_hi = max(0, -delta), min(jm, jmp)
    logs, signs = [], []
    for s in range(s_lo, s_hi + 1):
        cos_pow = 2 * jf + (jm - jp) - 2 * s
        sin_pow = delta + 2 * s
        logs.append(
            root
            - gammaln(jm - s + 1) - gammaln(s + 1) - gammaln(jmp - s + 1) - gammaln(delta + s + 1)
            + xlogy(cos_pow / 2, q) + xlogy(sin_pow / 2, 1.0 - q)
        )
        signs.append(-1.0 if s % 2 else 1.0)
    if not logs:
        return 0.0
    log_abs, sign = logsumexp(logs, b=signs, return_sign=True)
    return float(np.exp(2 * log_abs)) if sign != 0 else 0.0


def su2_transition(j: float, m: float, m_prime: float, g: float) -> float:
    """P(m -> m') for gS_x + tS_z."""
    return wigner_small_d_squared(j, m, m_prime, EulerBeta.from_coupling(g).q)


def oscillator_transition(n: int, n_prime: int, g_o: float) -> float:
    """P(n -> n') = (n<!/n>!) e^{-x} x^{|n-n'|} [L_{n<}^{|n-n'|}(x)]^2, x = 2 pi g_o^2."""
    if n < 0 or n_prime < 0:
        raise ParameterError("Fock indices must be non-negative")
    lo, hi = min(n, n_prime), max(n, n_prime)
    delta = hi - lo
    x = 2 * math.pi * g_o ** 2
    if x == 0:
        return 1.0 if delta == 0 else 0.0
    lag = laguerre_assoc(lo, delta, x)
    if lag == 0:
        return 0.0
    log_p = gammaln(lo + 1) - gammaln(hi + 1) - x + delta * math.log(x) + 2 * math.log(abs(lag))
    return float(math.exp(log_p))


def chain_transition(n: int, n_prime: int, g_lc: float) -> float:
    """P(n -> n') = J_{n-n'}(2 sqrt(2 pi) g_lc)^2."""
    return bessel_j(n - n_prime, 2 * math.sqrt(2 * math.pi) * g_lc) ** 2


def su11_transition(k: float, mu: float, mu_prime: float, g_tilde: float) -> float:
    """P(mu -> mu') inside the D_k^+ sector.

    With mu< = min(mu, mu'), mu> = max(mu, mu'), d = mu> - mu<:
    P = Theta^2 |z|^d |1-z|^{-(mu+mu')} F(k - mu<, 1 - mu< - k; 1 + d; z)^2,
    Theta^2 = Gamma(mu>+1-k) Gamma(mu>+k) / (Gamma(mu<+1-k) Gamma(mu<+k) (d!)^2).
    """
    kf = float(check_bargmann_index(k))
    if _integer_offset(mu, kf) < 0 or _integer_offset(mu_prime, kf) < 0:
        raise InvalidSectorState(f"mu={mu}, mu'={mu_prime} are not of the form k + n for k={k}")
    lo, hi = min(mu, mu_prime), max(mu, mu_prime)
    delta = _integer_offset(hi, lo)
    z = Su11Z.from_coupling(g_tilde).z
    if z == 0:
        return 1.0 if delta == 0 else 0.0

    log_theta, _ = theta_signed(kf, mu, mu_prime)
    f = hyp2f1_terminating(kf - lo, 1 - lo - kf, 1 + delta, z)
    if f == 0:
        return 0.0
    # |1 - z| = exp(2 pi g~^2)
    log_p = 2 * log_theta + xlogy(delta, abs(z)) - 2 * math.pi * g_tilde ** 2 * (mu + mu_prime) + 2 * math.log(abs(f))
    return float(math.exp(log_p))


def theta_signed(k: float, mu: float, mu_prime: float) -> Tuple[float, int]:
    """(log|Theta_{mu mu'}(k)|, sign), extended to mu < mu' by Theta_{mu' mu} = (-1)^{mu-mu'} Theta_{mu mu'}."""
    kf = float(check_bargmann_index(k))
    lo, hi = min(mu, mu_prime), max(mu, mu_prime)
    delta = _integer_offset(hi, lo)
    if delta < 0:
        raise InvalidSectorState(f"mu={mu} and mu'={mu_prime} differ by a non-integer")
    log_abs = 0.5 * (gammaln(hi + 1 - kf) + gammaln(hi + kf) - gammaln(lo + 1 - kf) - gammaln(lo + kf)) - gammaln(delta + 1)
    sign = 1 if mu >= mu_prime or delta % 2 == 0 else -1
    return float(log_abs), sign


def one_mode_state(n: int) -> Tuple[Fraction, Fraction]:
    """Fock state |n> of the one-mode realization as (k, mu): |2N> -> (1/4, N+1/4), |2N+1> -> (3/4, N+3/4)."""
    if n < 0:
        raise ParameterError("Fock index must be non-negative")
    k = Fraction(1, 4) if n % 2 == 0 else Fraction(3, 4)
    return k, Fraction(n, 2) + Fraction(1, 4)


def two_mode_state(n_a: int, n_b: int) -> Tuple[Fraction, Fraction]:
    """(n_a, n_b) -> (k, mu) = ((|n_a - n_b| + 1)/2, (n_a + n_b + 1)/2)."""
    if n_a < 0 or n_b < 0:
        raise ParameterError("occupation numbers must be non-negative")
    return Fraction(abs(n_a - n_b) + 1, 2), Fraction(n_a + n_b + 1, 2)


def two_level_survival(spec: ModelSpec) -> float:
    """Diabatic survival exp(-2 pi |p|^2/|slope difference|) of a two-state bordered model."""
    if spec.kind == ModelKind.EQUAL_SLOPE:
        slope = spec.b
    elif spec.kind == ModelKind.BOW_TIE:
        slope = spec.r[0]
    else:
        raise ParameterError(f"{spec.kind.value} is not a two-state model")
    return math.exp(-2 * math.pi * abs(spec.p[0]) ** 2 / abs(slope))


def has_closed_form(spec: ModelSpec) -> bool:
    if spec.kind in (ModelKind.SU2_SPIN, ModelKind.OSCILLATOR, ModelKind.LINEAR_CHAIN, ModelKind.SU11_SECTOR):
        return True
    if spec.kind == ModelKind.EQUAL_SLOPE:
        return len(spec.p) == 1
    return spec.kind == ModelKind.BOW_TIE and len(spec.p) == 1 and spec.r[0] != 0


def transition_table(spec: ModelSpec) -> np.ndarray:
    """Closed-form P[i, j] over the diabatic basis of the numeric builder."""
    if not has_closed_form(spec):
        raise ParameterError(f"no closed-form probabilities for {spec.kind.value} with N={spec.dim}")
    kind = spec.kind
    if kind in (ModelKind.EQUAL_SLOPE, ModelKind.BOW_TIE):
        q = two_level_survival(spec)
        return np.array([[q, 1 - q], [1 - q, q]])
    if kind == ModelKind.SU2_SPIN:
        m = spec.j - np.arange(spec.dim)
        return np.array([[su2_transition(spec.j, a, b, spec.g) for b in m] for a in m])
    if kind == ModelKind.OSCILLATOR:
        n = range(spec.cutoff + 1)
        return np.array([[oscillator_transition(a, b, spec.g_o) for b in n] for a in n])
    if kind == ModelKind.LINEAR_CHAIN:
        n = range(spec.n_min, spec.n_max + 1)
        return np.array([[chain_transition(a, b, spec.g_lc) for b in n] for a in n])
    mu = spec.k + np.arange(spec.cutoff + 1)
    return np.array([[su11_transition(spec.k, a, b, spec.g_tilde) for b in mu] for a in mu])

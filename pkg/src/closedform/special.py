"""Special functions used by the closed-form probabilities."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from src.utils.error_handling import NonPositiveArgument, NonTerminating, ParameterError, PolePassed

INTEGER_TOL = 1e-12
RESCALE_AT = 1e250


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise NonPositiveArgument(f"log_gamma needs x > 0, got {x}")
    return float(gammaln(x))


def laguerre_assoc(n: int, alpha: float, x: float) -> float:
    """Associated Laguerre polynomial L_n^alpha(x) by the three-term recurrence.

    (i) L_i = (2i - 1 + alpha - x) L_{i-1} - (i - 1 + alpha) L_{i-2}, with
    L_{-1} = 0 and L_0 = 1; valid for negative alpha as well.
    """
    if n < 0:
        raise ParameterError(f"Laguerre degree must be non-negative, got {n}")
    prev, cur = 0.0, 1.0
    for i in range(1, n + 1):
        prev, cur = cur, ((2 * i - 1 + alpha - x) * cur - (i - 1 + alpha) * prev) / i
    return cur


def bessel_j(order: int, x: float) -> float:
    """Integer-order Bessel J by Miller's downward recurrence.

    Normalized with J_0 + 2 sum_k J_{2k} = 1.
    """
    n = abs(int(order))
    sign = -1.0 if (order < 0 and n % 2) else 1.0
    if x < 0:
        x = -x
        sign *= -1.0 if n % 2 else 1.0
    if x == 0:
        return 1.0 if n == 0 else 0.0

    top = max(n, int(x)) + 20 + int(math.sqrt(40 * max(n, x, 1.0)))
    top += top % 2
    vals = np.zeros(top + 2)
    vals[top] = 1.0
    for k in range(top, 0, -1):
        vals[k - 1] = (2 * k / x) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > RESCALE_AT:
            vals[k - 1:] /= RESCALE_AT
    norm = vals[0] + 2.0 * np.sum(vals[2:top + 1:2])
    return sign * float(vals[n] / norm)


def _nonpositive_integer(v: float) -> bool:
    return abs(v - round(v)) < INTEGER_TOL and round(v) <= 0


def hyp2f1_terminating(a: float, b: float, c: float, z: float) -> float:
    """2F1(a, b; c; z) when a or b is a non-positive integer (finite sum)."""
    if _nonpositive_integer(a):
        terms = -int(round(a))
    elif _nonpositive_integer(b):
        terms = -int(round(b))
    else:
        raise NonTerminating(f"2F1({a}, {b}; {c}; z) is not a polynomial")

    total = [1.0]
    term = 1.0
    for k in range(terms):
        if abs(c + k) < INTEGER_TOL:
            raise PolePassed(f"c + {k} = 0 before the series terminates")
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total.append(term)
    return math.fsum(total)

"""Tests for closed-form transition probabilities and special functions"""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import eval_genlaguerre, factorial, gamma, gammaln, hyp2f1, jv

from src.closedform import (
    EulerBeta,
    Su11Z,
    bessel_j,
    chain_transition,
    has_closed_form,
    hyp2f1_terminating,
    laguerre_assoc,
    log_gamma,
    lz2_survival,
    one_mode_state,
    oscillator_transition,
    su11_transition,
    su2_transition,
    theta_signed,
    transition_table,
    two_mode_state,
    wigner_small_d_squared,
)
from src.models.specs import ModelKind, ModelSpec
from src.utils.error_handling import (
    InvalidBargmannIndex,
    InvalidMagneticQuantum,
    InvalidSectorState,
    InvalidSpin,
    NonPositiveArgument,
    NonTerminating,
    ParameterError,
    PolePassed,
)


# special functions

def test_log_gamma_matches_scipy():
    for x in [0.25, 0.5, 1.0, 3.7, 50.0, 1500.5]:
        assert log_gamma(x) == pytest.approx(gammaln(x), rel=1e-14)
    with pytest.raises(NonPositiveArgument):
        log_gamma(0.0)


def test_laguerre_matches_scipy():
    for n in [0, 1, 2, 5, 12, 30]:
        for alpha in [-0.5, 0.0, 1.0, 3.0, 10.0]:
            x = np.linspace(0.0, 10.0, 21)
            ours = np.array([laguerre_assoc(n, alpha, v) for v in x])
            expected = eval_genlaguerre(n, alpha, x)
            np.testing.assert_allclose(ours, expected, rtol=1e-9, atol=1e-10 * np.max(np.abs(expected)))
    with pytest.raises(ParameterError):
        laguerre_assoc(-1, 0.0, 1.0)


def test_bessel_matches_scipy():
    for x in [0.1, 1.0, 2.5, 7.3, 20.0]:
        for order in range(-25, 26):
            assert bessel_j(order, x) == pytest.approx(jv(order, x), abs=1e-12)
    assert bessel_j(3, -1.5) == pytest.approx(jv(3, -1.5), abs=1e-13)
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(4, 0.0) == 0.0


def test_bessel_squares_sum_to_one():
    for x in [0.5, 2.5, 10.0]:
        total = sum(bessel_j(n, x) ** 2 for n in range(-60, 61))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_hyp2f1_terminating_matches_scipy():
    cases = [(-3, 0.5, 2.0, -0.7), (-6, 1.25, 4.0, -2.5), (0.75, -4, 1.0, -0.2), (-1, 3.0, 5.0, 0.3)]
    for a, b, c, z in cases:
        assert hyp2f1_terminating(a, b, c, z) == pytest.approx(hyp2f1(a, b, c, z), rel=1e-12)
    assert hyp2f1_terminating(0, 2.0, 3.0, -1.0) == 1.0


def test_hyp2f1_errors():
    with pytest.raises(NonTerminating):
        hyp2f1_terminating(0.5, 1.5, 2.0, -0.5)
    with pytest.raises(PolePassed):
        hyp2f1_terminating(-3, 1.0, -1.0, 0.5)


# two-level and SU(2)

def test_lz2_survival():
    assert lz2_survival(0.0) == 1.0
    assert lz2_survival(1.0) == pytest.approx(math.exp(-math.pi / 2))
    assert su2_transition(0.5, 0.5, 0.5, 1.0) == pytest.approx(math.exp(-math.pi / 2), rel=1e-12)
    assert su2_transition(0.5, 0.5, -0.5, 1.0) == pytest.approx(-math.expm1(-math.pi / 2), rel=1e-12)


def test_euler_beta():
    b = EulerBeta.from_coupling(0.8)
    assert math.cos(b.beta / 2) ** 2 == pytest.approx(b.q)
    assert EulerBeta(1.0).beta == 0.0
    with pytest.raises(ParameterError):
        EulerBeta(0.0)


def test_spin_one_closed_forms():
    for q in [0.1, 0.5, 0.83]:
        assert wigner_small_d_squared(1, 1, 1, q) == pytest.approx(q ** 2, rel=1e-12)
        assert wigner_small_d_squared(1, 1, 0, q) == pytest.approx(2 * q * (1 - q), rel=1e-12)
        assert wigner_small_d_squared(1, 0, -1, q) == pytest.approx(2 * q * (1 - q), rel=1e-12)
        assert wigner_small_d_squared(1, 1, -1, q) == pytest.approx((1 - q) ** 2, rel=1e-12)
        assert wigner_small_d_squared(1, 0, 0, q) == pytest.approx((2 * q - 1) ** 2, abs=1e-14)


def test_wigner_rows_and_columns_sum_to_one():
    for j in [0.5, 1.5, 3.0, 7.5, 20.0]:
        table = transition_table(ModelSpec(kind=ModelKind.SU2_SPIN, j=j, g=0.7))
        np.testing.assert_allclose(table.sum(axis=0), 1.0, atol=1e-10)
        np.testing.assert_allclose(table.sum(axis=1), 1.0, atol=1e-10)
        np.testing.assert_allclose(table, table.T, atol=1e-12)


def test_wigner_large_spin_stays_finite():
    p = wigner_small_d_squared(500, 500, -500, 0.3)
    assert p == pytest.approx(0.7 ** 1000, rel=1e-9)
    assert np.isfinite(wigner_small_d_squared(500, 3, -7, 0.3))


def test_su2_errors():
    with pytest.raises(InvalidMagneticQuantum):
        su2_transition(1.0, 0.5, 1.0, 0.3)
    with pytest.raises(InvalidMagneticQuantum):
        su2_transition(1.0, 2.0, 1.0, 0.3)
    with pytest.raises(InvalidSpin):
        su2_transition(0.3, 0.3, 0.3, 0.3)


# SU(1,1) descendants

def test_oscillator_matches_laguerre_oracle():
    g_o = 0.35
    x = 2 * math.pi * g_o ** 2
    for n in range(6):
        for n_prime in range(6):
            lo, hi = min(n, n_prime), max(n, n_prime)
            d = hi - lo
            expected = factorial(lo) / factorial(hi) * math.exp(-x) * x ** d * eval_genlaguerre(lo, d, x) ** 2
            assert oscillator_transition(n, n_prime, g_o) == pytest.approx(expected, rel=1e-10, abs=1e-15)


def test_oscillator_vacuum_is_poisson():
    x = 2 * math.pi * 0.3 ** 2
    for n in range(10):
        assert oscillator_transition(0, n, 0.3) == pytest.approx(math.exp(-x) * x ** n / math.factorial(n), rel=1e-12)


def test_oscillator_rows_sum_to_one():
    for n in range(6):
        total = sum(oscillator_transition(n, m, 0.3) for m in range(120))
        assert total == pytest.approx(1.0, abs=1e-10)
    assert oscillator_transition(3, 3, 0.0) == 1.0
    with pytest.raises(ParameterError):
        oscillator_transition(-1, 0, 0.3)


def test_chain_matches_bessel_oracle():
    g_lc = 0.4
    for n, n_prime in [(0, 0), (0, 3), (-2, 5), (7, -1)]:
        assert chain_transition(n, n_prime, g_lc) == pytest.approx(
            jv(n - n_prime, 2 * math.sqrt(2 * math.pi) * g_lc) ** 2, abs=1e-13
        )
    total = sum(chain_transition(0, m, g_lc) for m in range(-40, 41))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_large_spin_tends_to_oscillator():
    """Near the top of a spin-j ladder, g = g_o sqrt(2/j) reproduces the oscillator"""
    j, g_o = 200, 0.4
    g = g_o * math.sqrt(2 / j)
    for n in range(4):
        for n_prime in range(4):
            assert su2_transition(j, j - n, j - n_prime, g) == pytest.approx(
                oscillator_transition(n, n_prime, g_o), abs=5e-3
            )


def test_highly_excited_oscillator_tends_to_chain():
    """Around Fock level n_bar, g_o = g_lc / sqrt(n_bar) reproduces the chain"""
    n_bar, g_lc = 400, 0.5
    g_o = g_lc / math.sqrt(n_bar)
    for n in range(-2, 3):
        for n_prime in range(-2, 3):
            assert oscillator_transition(n_bar + n, n_bar + n_prime, g_o) == pytest.approx(
                chain_transition(n, n_prime, g_lc), abs=5e-3
            )


def _su11_oracle(k, mu, mu_prime, g_tilde):
    z = -math.expm1(2 * math.pi * g_tilde ** 2)
    lo, hi = min(mu, mu_prime), max(mu, mu_prime)
    d = int(round(hi - lo))
    theta2 = gamma(hi + 1 - k) * gamma(hi + k) / (gamma(lo + 1 - k) * gamma(lo + k) * factorial(d) ** 2)
    f = hyp2f1(k - lo, 1 - lo - k, 1 + d, z)
    return theta2 * abs(z) ** d * abs(1 - z) ** (-(mu + mu_prime)) * f ** 2


@pytest.mark.parametrize("k", [0.25, 0.75, 0.5, 1.5])
def test_su11_matches_hypergeometric_oracle(k):
    g_tilde = 0.25
    for n in range(5):
        for n_prime in range(5):
            mu, mu_prime = k + n, k + n_prime
            assert su11_transition(k, mu, mu_prime, g_tilde) == pytest.approx(
                _su11_oracle(k, mu, mu_prime, g_tilde), rel=1e-9, abs=1e-15
            )


def test_su11_two_mode_vacuum_is_geometric():
    g_tilde = 0.3
    ratio = -math.expm1(-2 * math.pi * g_tilde ** 2)
    for d in range(8):
        assert su11_transition(0.5, 0.5, 0.5 + d, g_tilde) == pytest.approx((1 - ratio) * ratio ** d, rel=1e-12)


@pytest.mark.parametrize("k", [0.25, 0.75, 1.0])
def test_su11_columns_sum_to_one(k):
    for n in range(4):
        total = sum(su11_transition(k, k + n, k + m, 0.2) for m in range(200))
        assert total == pytest.approx(1.0, abs=1e-8)


def test_su11_errors():
    with pytest.raises(InvalidSectorState):
        su11_transition(0.75, 1.0, 1.75, 0.2)
    with pytest.raises(InvalidBargmannIndex):
        su11_transition(0.3, 0.3, 1.3, 0.2)
    with pytest.raises(ParameterError):
        Su11Z(0.5)
    assert Su11Z.from_coupling(0.0).z == 0.0
    assert su11_transition(0.75, 1.75, 1.75, 0.0) == 1.0


def test_theta_sign_convention():
    log_abs, sign = theta_signed(0.75, 3.75, 0.75)
    assert sign == 1
    log_swapped, sign_swapped = theta_signed(0.75, 0.75, 3.75)
    assert log_swapped == pytest.approx(log_abs)
    assert sign_swapped == -1
    assert theta_signed(0.75, 0.75, 2.75)[1] == 1
    expected = 0.5 * (gammaln(3.75 + 0.25) + gammaln(4.5) - gammaln(1.0) - gammaln(1.5)) - gammaln(4)
    assert log_abs == pytest.approx(expected)


def test_sector_state_maps():
    assert one_mode_state(4) == (Fraction(1, 4), Fraction(9, 4))
    assert one_mode_state(3) == (Fraction(3, 4), Fraction(7, 4))
    assert two_mode_state(2, 5) == (Fraction(2), Fraction(4))
    assert two_mode_state(3, 3) == (Fraction(1, 2), Fraction(7, 2))
    with pytest.raises(ParameterError):
        one_mode_state(-1)
    with pytest.raises(ParameterError):
        two_mode_state(0, -2)


def test_one_mode_state_matches_oscillator_sector():
    """Even Fock states land in k = 1/4 with consecutive mu"""
    k, mu0 = one_mode_state(0)
    _, mu1 = one_mode_state(2)
    assert mu1 - mu0 == 1
    assert k == Fraction(1, 4)


# tables

def test_two_state_tables():
    bowtie = ModelSpec(kind=ModelKind.BOW_TIE, p=[0.3], r=[2.0])
    q = math.exp(-2 * math.pi * 0.09 / 2.0)
    np.testing.assert_allclose(transition_table(bowtie), [[q, 1 - q], [1 - q, q]])

    es = ModelSpec(kind=ModelKind.EQUAL_SLOPE, p=[0.3], a=[0.5], b=-0.5)
    q = math.exp(-2 * math.pi * 0.09 / 0.5)
    np.testing.assert_allclose(transition_table(es), [[q, 1 - q], [1 - q, q]])


def test_has_closed_form():
    assert has_closed_form(ModelSpec(kind=ModelKind.SU2_SPIN, j=2, g=0.5))
    assert has_closed_form(ModelSpec(kind=ModelKind.LINEAR_CHAIN, g_lc=0.3, n_min=-5, n_max=5))
    assert has_closed_form(ModelSpec(kind=ModelKind.BOW_TIE, p=[0.3], r=[1.0]))
    assert not has_closed_form(ModelSpec(kind=ModelKind.BOW_TIE, p=[0.3, 0.2], r=[1.0, -1.0]))
    assert not has_closed_form(
        ModelSpec(kind=ModelKind.GENERALIZED_BOW_TIE, p=[0.3], r=[1.0], epsilon=0.5)
    )
    with pytest.raises(ParameterError):
        transition_table(ModelSpec(kind=ModelKind.BOW_TIE, p=[0.3, 0.2], r=[1.0, -1.0]))


def test_truncated_table_shapes():
    chain = transition_table(ModelSpec(kind=ModelKind.LINEAR_CHAIN, g_lc=0.3, n_min=-6, n_max=6))
    assert chain.shape == (13, 13)
    np.testing.assert_allclose(chain[6].sum(), 1.0, atol=1e-6)

    sector = transition_table(ModelSpec(kind=ModelKind.SU11_SECTOR, k=0.75, g_tilde=0.2, cutoff=30))
    assert sector.shape == (31, 31)
    assert np.all(sector.sum(axis=1) <= 1.0 + 1e-12)

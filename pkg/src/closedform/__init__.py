"""Closed-form transition probabilities and the special functions behind them."""

from src.closedform.probabilities import (
    EulerBeta,
    Su11Z,
    chain_transition,
    has_closed_form,
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
from src.closedform.special import bessel_j, hyp2f1_terminating, laguerre_assoc, log_gamma

__all__ = [
    "EulerBeta",
    "Su11Z",
    "bessel_j",
    "chain_transition",
    "has_closed_form",
    "hyp2f1_terminating",
    "laguerre_assoc",
    "log_gamma",
    "lz2_survival",
    "one_mode_state",
    "oscillator_transition",
    "su11_transition",
    "su2_transition",
    "theta_signed",
    "transition_table",
    "two_mode_state",
    "wigner_small_d_squared",
]

"""Secular-equation roots, eigenvalue degeneracies and level crossings."""

from src.spectra.degeneracy import CrossingScan, degeneracy_profile, level_crossing_scan
from src.spectra.secular import SecularKind, SecularSpec, char_roots, check_roots, secular_spec_for

__all__ = [
    "CrossingScan",
    "SecularKind",
    "SecularSpec",
    "char_roots",
    "check_roots",
    "degeneracy_profile",
    "level_crossing_scan",
    "secular_spec_for",
]

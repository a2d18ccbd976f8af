"""Commuting families and their numerical verification."""

from src.commutant.families import (
    CommutingFamily,
    Construction,
    Embedding,
    FamilyParams,
    bowtie_general_quadratic_partner,
    bowtie_identity_residuals,
    bowtie_quadratic_family,
    embed_equal_slope,
    gbt_linear_partner,
    gbt_minimal_family,
    general_gbt_partner,
    maximal_linear_family,
)
from src.commutant.verification import (
    TrivialityReport,
    Verdict,
    commutator_norm,
    family_span_dim,
    maximal_family_member,
    nontrivial_partner_count,
    partner_space,
    sample_u,
    shared_symmetry_dim,
    trivial_span,
    triviality_residual,
)

__all__ = [
    "CommutingFamily",
    "Construction",
    "Embedding",
    "FamilyParams",
    "TrivialityReport",
    "Verdict",
    "bowtie_general_quadratic_partner",
    "bowtie_identity_residuals",
    "bowtie_quadratic_family",
    "commutator_norm",
    "embed_equal_slope",
    "family_span_dim",
    "gbt_linear_partner",
    "gbt_minimal_family",
    "general_gbt_partner",
    "maximal_family_member",
    "maximal_linear_family",
    "nontrivial_partner_count",
    "partner_space",
    "sample_u",
    "shared_symmetry_dim",
    "trivial_span",
    "triviality_residual",
]

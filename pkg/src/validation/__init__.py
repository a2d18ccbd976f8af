"""Sanity checks on scenario reports."""

from src.validation.report_validator import ReportValidator, ValidationResult

__all__ = ["ReportValidator", "ValidationResult"]

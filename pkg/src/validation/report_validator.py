"""
Report Validation
Sanity checks on assembled scenario reports
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.utils.settings import Settings, load_settings

logger = logging.getLogger(__name__)

PROBABILITY_SLACK = 1e-9
UNITARITY_TOL = 1e-6


@dataclass
class ValidationResult:
    """Container for validation results"""
    is_valid: bool
    warnings: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    detailed_checks: Dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_valid": self.is_valid,
            "warnings": self.warnings,
            "errors": self.errors,
            "checks": self.detailed_checks,
        }


class ReportValidator:
    """Validates scenario reports for impossible values and unmet invariants"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or load_settings()
        self.validation_rules = {
            "check_probability_range": self._check_probability_range,
            "check_unitarity": self._check_unitarity,
            "check_comparison_entries": self._check_comparison_entries,
            "check_tail": self._check_tail,
            "check_convergence": self._check_convergence,
        }

    def validate(self, report) -> ValidationResult:
        """
        Run every rule against ``report.results``

        Rules return {"passed", "severity", "messages"}; failed error-severity
        rules make the report invalid.
        """
        warnings: List[str] = []
        errors: List[str] = []
        detailed_checks: Dict[str, bool] = {}

        for check_name, check_func in self.validation_rules.items():
            check_result = check_func(report.results)
            detailed_checks[check_name] = check_result["passed"]
            if not check_result["passed"]:
                if check_result["severity"] == "error":
                    errors.extend(check_result["messages"])
                else:
                    warnings.extend(check_result["messages"])

        return ValidationResult(
            is_valid=not errors,
            warnings=warnings,
            errors=errors,
            detailed_checks=detailed_checks,
        )

    def _check_probability_range(self, results: Dict) -> Dict:
        """Probabilities lie in [0, 1] up to round-off"""
        messages = []
        matrices = []
        if "Propagate" in results:
            matrices.append(("Propagate", np.asarray(results["Propagate"]["P"])))
        if "CompareClosedForm" in results:
            entries = results["CompareClosedForm"]["entries"]
            matrices.append(("CompareClosedForm", np.array([[e["closed_form"], e["numeric"]] for e in entries])))

        for task, values in matrices:
            low, high = float(values.min()), float(values.max())
            if low < -PROBABILITY_SLACK or high > 1 + PROBABILITY_SLACK:
                messages.append(f"{task}: probabilities outside [0, 1] (min {low:.3e}, max {high:.3e})")

        return {"passed": not messages, "severity": "error", "messages": messages}

    def _check_unitarity(self, results: Dict) -> Dict:
        """Row and column sums of the numeric matrix"""
        messages = []
        prop = results.get("Propagate")
        if prop:
            for key in ("row_defect", "col_defect"):
                if prop[key] > UNITARITY_TOL:
                    messages.append(f"Propagate: {key} {prop[key]:.2e} exceeds {UNITARITY_TOL:.0e}")
        return {"passed": not messages, "severity": "warning", "messages": messages}

    def _check_comparison_entries(self, results: Dict) -> Dict:
        """Every comparison entry carries both values and their absolute difference"""
        messages = []
        cmp = results.get("CompareClosedForm")
        if cmp:
            for e in cmp["entries"]:
                missing = [k for k in ("closed_form", "numeric", "residual") if e.get(k) is None]
                if missing:
                    messages.append(f"comparison entry {e.get('from')}->{e.get('to')} lacks {missing}")
                elif abs(abs(e["closed_form"] - e["numeric"]) - e["residual"]) > 1e-15:
                    messages.append(f"comparison entry {e['from']}->{e['to']} has an inconsistent residual")
        return {"passed": not messages, "severity": "error", "messages": messages}

    def _check_tail(self, results: Dict) -> Dict:
        """Finite-horizon tail against the comparison tolerance"""
        messages = []
        tol = self.settings.comparison.probability_tol
        for task in ("Propagate", "ConvergenceStudy"):
            tail = results.get(task, {}).get("tail_estimate")
            if tail is not None and tail > tol:
                messages.append(f"{task}: tail estimate {tail:.2e} exceeds {tol:.0e}")
        return {"passed": not messages, "severity": "warning", "messages": messages}

    def _check_convergence(self, results: Dict) -> Dict:
        """Cutoff studies, horizon studies and propagations flagged as not converged"""
        messages = []
        study = results.get("ConvergenceStudy")
        if study and study.get("study") == "cutoff" and not study["converged"]:
            messages.append(f"cutoff study over {study['cutoffs']} not converged to {study['tolerance']:.0e}")
        if study and study.get("study") == "horizon" and not study.get("converged", True):
            messages.append(f"horizon study over {study['horizons']} does not follow a 1/T tail")
        prop = results.get("Propagate")
        if prop and not prop.get("converged", True):
            messages.append("Propagate: probabilities carry finite-horizon tails")
        return {"passed": not messages, "severity": "warning", "messages": messages}

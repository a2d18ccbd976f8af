"""
Error hierarchy and error collection for model construction, numerics and reporting
"""

import logging
import functools
from typing import Callable, Any, Optional, Dict
from datetime import datetime

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class LZError(Exception):
    """Base exception for every failure raised by this package"""
    exit_code = EXIT_VALIDATION


# ---------------------------------------------------------------------------
# Parameter / validation errors (exit code 2)
# ---------------------------------------------------------------------------

class ParameterError(LZError):
    """Invalid model parameters, scenario contents or call preconditions"""
    exit_code = EXIT_VALIDATION

class ZeroCoupling(ParameterError):
    pass

class ZeroSlope(ParameterError):
    pass

class DuplicateSlope(ParameterError):
    pass

class ZeroSlopeEntry(ParameterError):
    pass

class InvalidSpin(ParameterError):
    pass

class CutoffTooSmall(ParameterError):
    pass

class WindowTooSmall(ParameterError):
    pass

class InvalidBargmannIndex(ParameterError):
    pass

class NotGaugeable(ParameterError):
    pass

class DegenerateXi(ParameterError):
    pass

class ZeroDetuning(ParameterError):
    pass

class DimensionMismatch(ParameterError):
    pass

class DegeneratePoles(ParameterError):
    pass

class InvalidMagneticQuantum(ParameterError):
    pass

class InvalidSectorState(ParameterError):
    pass

class NonPositiveArgument(ParameterError):
    pass

class ProbeOutsideCutoff(ParameterError):
    pass

class NonTerminating(ParameterError):
    pass

class PolePassed(ParameterError):
    pass

class ScenarioError(ParameterError):
    """Scenario file or scenario object violates its schema"""
    pass

class ReportValidationError(ParameterError):
    """Report content refused at construction (non-finite entries etc.)"""
    pass


# ---------------------------------------------------------------------------
# Numerical errors (exit code 3)
# ---------------------------------------------------------------------------

class NumericalError(LZError):
    """A numerical procedure failed or a tolerance was breached"""
    exit_code = EXIT_NUMERICAL

class RootBracketFailure(NumericalError):
    pass

class NotACommutingPartner(NumericalError):
    pass

class StepLimitExceeded(NumericalError):
    pass

class ToleranceUnreachable(NumericalError):
    pass

class NonConvergentTail(NumericalError):
    pass

class ToleranceBreach(NumericalError):
    """A scenario acceptance check exceeded its tolerance"""
    pass


# ---------------------------------------------------------------------------
# Reporting / IO errors (exit code 4)
# ---------------------------------------------------------------------------

class ReportError(LZError):
    exit_code = EXIT_IO

class UnsupportedFormat(ReportError):
    pass

class ReportIOError(ReportError):
    pass


class TaskError(LZError):
    """Module error re-raised with the scenario and task it occurred in"""

    def __init__(self, scenario: str, task: str, cause: LZError):
        super().__init__(f"[{scenario}/{task}] {type(cause).__name__}: {cause}")
        self.scenario = scenario
        self.task = task
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", EXIT_NUMERICAL)


def with_task_context(scenario: str, task: str):
    """
    Decorator attaching scenario/task context to LZError raised inside a task

    Args:
        scenario: Scenario name
        task: Task name
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            try:
                return func(*args, **kwargs)
            except TaskError:
                raise
            except LZError as e:
                logger.error(f"{scenario}/{task} failed: {type(e).__name__}: {e}")
                raise TaskError(scenario, task, e) from e
        return wrapper
    return decorator


class ErrorCollector:
    """Collect errors during batch runs for later analysis"""

    def __init__(self):
        self.errors = []

    def add_error(self,
                  error_type: str,
                  message: str,
                  exit_code: int = EXIT_NUMERICAL,
                  context: Optional[Dict[str, Any]] = None) -> None:
        """Add an error to the collection"""
        error_entry = {
            "timestamp": datetime.now().isoformat(),
            "type": error_type,
            "message": message,
            "exit_code": exit_code,
            "context": context or {}
        }
        self.errors.append(error_entry)
        logger.error(f"{error_type}: {message}")

    def add_exception(self, exc: BaseException, context: Optional[Dict[str, Any]] = None) -> None:
        code = getattr(exc, "exit_code", EXIT_NUMERICAL)
        self.add_error(type(exc).__name__, str(exc), code, context)

    def get_summary(self) -> Dict[str, Any]:
        """Get summary of collected errors"""
        if not self.errors:
            return {"total_errors": 0, "errors_by_type": {}}

        errors_by_type = {}
        for error in self.errors:
            error_type = error["type"]
            errors_by_type[error_type] = errors_by_type.get(error_type, 0) + 1

        return {
            "total_errors": len(self.errors),
            "errors_by_type": errors_by_type,
            "first_error": self.errors[0],
            "last_error": self.errors[-1],
            "all_errors": self.errors
        }

    def has_errors(self) -> bool:
        return len(self.errors) > 0

    def exit_code(self) -> int:
        """Largest exit code among collected errors, 0 when clean"""
        return max((e["exit_code"] for e in self.errors), default=EXIT_OK)

    def clear(self) -> None:
        self.errors = []

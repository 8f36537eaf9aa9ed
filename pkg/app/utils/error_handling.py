"""
Error handling utilities.
"""
import logging
import traceback
from enum import Enum
from typing import Dict, Any, Optional

# Configure logging
logger = logging.getLogger(__name__)

# Exit codes of the command-line front end
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


class AppError(Exception):
    """Base class for application errors."""

    code = "error"

    def __init__(self, message: str, code: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        """
        Initialize the error.

        Args:
            message: Error message
            code: Diagnostic code (defaults to the class code)
            details: Additional error details
        """
        self.message = message
        if code is not None:
            self.code = code
        self.details = details or {}
        super().__init__(self.message)


class StructuralError(AppError):
    """A malformed syntax object: arity mismatch, bad frame, bad connective use."""
    code = "structural-error"


class VocabularyMismatchError(AppError):
    """Objects built over different vocabularies were combined."""
    code = "vocabulary-mismatch"


class EvaluationError(AppError):
    """Evaluation was asked for something the structure cannot answer."""
    code = "evaluation-error"


class TruthValueRangeError(AppError):
    """A truth value outside [0,1]."""
    code = "value-out-of-range"


class StructureError(AppError):
    """A general structure whose tables are incomplete or inconsistent."""
    code = "structure-error"


class UltrafilterError(AppError):
    code = "ultrafilter-error"


class ExpansionError(AppError):
    """The expansion machinery got a vocabulary it cannot handle directly."""
    code = "expansion-error"


class DepthExceededError(AppError):
    code = "depth-exceeded"


class InterpretationError(AppError):
    code = "interpretation-error"


class UsageError(AppError):
    """Bad command-line arguments."""
    code = "usage-error"


class DiagnosticCode(str, Enum):
    UNKNOWN_SYMBOL = "unknown-symbol"
    ARITY_MISMATCH = "arity-mismatch"
    UNBALANCED_PARENTHESES = "unbalanced-parentheses"
    VALUE_OUT_OF_RANGE = "value-out-of-range"
    SYNTAX_ERROR = "syntax-error"
    INCOMPLETE_TABLE = "incomplete-table"
    DUPLICATE_ENTRY = "duplicate-entry"
    FOREIGN_ELEMENT = "foreign-element"
    NOT_A_SENTENCE = "not-a-sentence"
    INVALID_NAME = "invalid-name"


class ParseError(AppError):
    """A diagnostic produced while reading one of the text formats."""

    def __init__(self, code: DiagnosticCode, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(
            f"{message} (at {line}:{column})",
            code=code.value,
            details={"line": line, "column": column},
        )
        self.diagnostic = code


def log_error(error: Exception, context: Optional[Dict[str, Any]] = None) -> None:
    """
    Log an error with context.

    Args:
        error: The exception to log
        context: Additional context for the error
    """
    error_type = type(error).__name__
    error_message = str(error)

    log_data = {
        "error_type": error_type,
        "error_message": error_message,
    }
    if not isinstance(error, AppError):
        log_data["error_traceback"] = traceback.format_exc()

    if context:
        log_data.update(context)

    logger.error(f"Error: {error_type} - {error_message}", extra=log_data)


def format_error_response(error: Exception) -> Dict[str, Any]:
    """
    Format an error for a command report.

    Args:
        error: The exception to format

    Returns:
        Dictionary with error details
    """
    if isinstance(error, AppError):
        return {
            "error": error.message,
            "code": error.code,
            "details": error.details,
        }
    else:
        return {
            "error": str(error),
            "code": "internal-error",
            "details": {},
        }

"""Exception types raised by the toolkit."""

from typing import Any, Dict, Optional


class SharpExtensionError(Exception):
    """Base class for toolkit errors."""


class GeometryError(SharpExtensionError, ValueError):
    """Arc data violates convexity, positivity or the colinear-tangent margin."""


class FieldError(SharpExtensionError, ValueError):
    """An arc function or plane field is malformed for the requested operation."""


class ConfigError(SharpExtensionError, ValueError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalFailure(SharpExtensionError, RuntimeError):
    """A numerical routine broke down; diagnostics describe where."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)

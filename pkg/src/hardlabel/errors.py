"""Exception types shared across the toolkit."""


class HardLabelError(Exception):
    """Base class for all toolkit errors."""


class BudgetExhausted(HardLabelError):
    """Raised when a query would exceed the oracle's query budget."""


class DimensionMismatch(HardLabelError):
    """Queried point length does not match the model input width."""


class ParseError(HardLabelError):
    """Model or dataset file does not parse under its format."""


class ShapeError(HardLabelError):
    """Model layer shapes are incompatible."""


class RangeError(HardLabelError):
    """Dataset feature outside the [0, 1] box."""


class EmptyInput(HardLabelError):
    """Metric requested over an empty result set."""


class NoSuccesses(HardLabelError):
    """Query statistics requested but no attack succeeded at this epsilon."""


class MissingHistory(HardLabelError):
    """Curve construction requested on results without per-query history."""


class ConfigError(HardLabelError):
    """Invalid run configuration."""

"""Exception types shared across the package."""


class HsicsensError(Exception):
    """Base class for all package-specific errors."""


class InvalidData(HsicsensError):
    """Input array contains NaN/Inf or has an unusable shape."""


class InvalidConfig(HsicsensError):
    """Kernel or regressor configuration is out of range."""


class DegenerateData(HsicsensError):
    """Data admits no usable bandwidth (all rows identical)."""


class DegeneratePair(HsicsensError):
    """One side of a pair is constant; no direction can be inferred."""


class ShapeMismatch(HsicsensError):
    """Paired inputs disagree on sample count."""


class InsufficientData(HsicsensError):
    """Too few samples for the requested operation."""


class DimensionError(HsicsensError):
    """A designated variable spans more than one column."""


class EmptyInput(HsicsensError):
    """An aggregate was requested over zero usable records."""


class ParseError(HsicsensError):
    """A data or config file failed to parse.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

"""Exception types shared across the package."""


class MaxplusError(Exception):
    """Base class for all library errors."""


class DimensionError(MaxplusError):
    """Operand shapes are incompatible."""


class NoCyclesError(MaxplusError):
    """The digraph of the matrix has no cycles, so no cycle mean exists."""


class DivergentStarError(MaxplusError):
    """Kleene star diverges: some component has positive max cycle mean.

    Attributes carry the offending component (node list) and its cycle mean
    when known, and the node where a positive diagonal appeared otherwise.
    """

    def __init__(self, message, component=None, value=None, node=None):
        super().__init__(message)
        self.component = component
        self.value = value
        self.node = node


class NotDefiniteError(MaxplusError):
    """Matrix is not definite: its max cycle mean is not zero."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class NotCriticalPartError(MaxplusError):
    """Matrix is not a critical-part matrix (some edge is off every
    maximal-mean cycle, or the cycle mean is not zero)."""


class RotationUnavailableError(MaxplusError):
    """Cyclic-class rotation needs a Boolean S factor."""


class ThresholdError(MaxplusError):
    """Requested exponent is below the validity threshold of the route."""


class OracleSizeError(MaxplusError):
    """Instance too large for the brute-force oracle."""


class NotOrbitPeriodicError(MaxplusError):
    """Operation requires an orbit periodic matrix."""


class ZeroVectorError(MaxplusError):
    """Operation requires a vector with at least one finite entry."""


class TrivialColumnError(MaxplusError):
    """Column index does not belong to any nontrivial component."""


class ParseError(MaxplusError):
    """Malformed matrix or vector input.

    line/column are 1-based positions into the source text when available.
    """

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column

"""Exception types shared across the package."""


class InflexError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(InflexError):
    """Malformed or out-of-contract input (non-finite data, bad widths, ...)."""


class PartialOrderError(InflexError):
    """A derivative of higher order than the model declares was requested."""

    def __init__(self, requested, available):
        self.requested = requested
        self.available = available
        super().__init__(
            f"partial derivative order {requested} exceeds the declared "
            f"maximum {available}"
        )


class ModelParseError(InflexError):
    """A model description string could not be parsed."""


class AccuracyError(InflexError):
    """A quadrature or tail bound could not meet the requested tolerance."""


class AliasingError(InflexError):
    """A grid transform was requested beyond the grid's Nyquist frequency."""

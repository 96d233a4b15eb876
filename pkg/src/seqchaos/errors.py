"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters: bad sequence/system/observable/experiment configuration."""


class DomainError(ValueError):
    """A point, coordinate or operand is outside the phase space it is used in."""


class SequenceOverflowError(OverflowError):
    """A sequence term left the supported integer range.

    Terms are capped at 2**63 - 1 so that every generated time fits a signed
    64-bit integer; generation fails loudly instead of wrapping around.
    """

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"sequence term #{index} exceeds 2**63 - 1")

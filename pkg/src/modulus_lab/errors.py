"""Exception hierarchy."""


class ModulusError(Exception):
    """Base class for errors raised by modulus_lab."""


class DimensionError(ModulusError, ValueError):
    """Array lengths or cell indices do not agree with the cell space."""


class ContractError(ModulusError, ValueError):
    """An operation was called outside its documented preconditions."""


class UnsupportedInstanceError(ModulusError, ValueError):
    """The instance is valid but outside what the routine can evaluate."""


class InstanceTooLargeError(ModulusError, ValueError):
    """Brute-force search refused because the grid would be too large."""


class SchemaError(ModulusError, ValueError):
    """A structured-text document does not match the expected schema."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

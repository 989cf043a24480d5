"""Exception types shared across the package."""


class FlowModelError(Exception):
    """Base class for every error raised by odflow."""


class ValidationError(FlowModelError):
    """Input data violates a documented constraint (bad coordinate, negative count, ...)."""


class ParseError(ValidationError):
    """Malformed text input; the message names the offending token or cell."""


class ConfigurationError(FlowModelError):
    """A configuration is unusable as given (missing partition value, unsorted breaks, ...)."""


class ContractError(FlowModelError):
    """Operands passed to an operation do not fit together (dimension or ordering mismatch)."""

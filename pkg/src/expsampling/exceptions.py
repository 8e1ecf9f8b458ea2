"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation (e.g. x <= 0)."""


class NumericalError(ArithmeticError):
    """A quadrature or summation failed to reach its tolerance."""


class KernelConstructionError(ValueError):
    """A combined kernel could not be built from the given inner kernels."""


class NoLimitError(ArithmeticError):
    """The series has no pointwise limit at the requested jump."""


class JitterRejected(ValueError):
    """A perturbed sample node left the piece that contains the exact node."""

    def __init__(self, message, node_index=None):
        super().__init__(message)
        self.node_index = node_index


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the offending line when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

"""Typed errors shared across the library."""


class RegcharError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(RegcharError):
    """Operands live in different matrix sizes."""


class NotRealSemisimpleRegular(RegcharError):
    """Eigenvalues are repeated or the matrix is defective; flag enumeration
    by eigenline orderings is outside the implemented scope."""


class NotAFixedPoint(RegcharError):
    """The supplied coset is not fixed by the group element."""


class CentralElement(RegcharError):
    """The element is +1 or -1 and fixes the whole space."""


class ChartDomainError(RegcharError):
    """A point lies outside the requested chart's domain."""


class CertificationError(RegcharError):
    """A test function's support could not be certified transversal."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class HaarValidationError(RegcharError):
    """The quadrature measure failed the left-invariance validation."""


class UnvalidatedGridError(RegcharError):
    """An operation requiring a validated Haar grid received an unvalidated one."""


class DensitySupportError(RegcharError):
    """The diagonal density fails to vanish near the boundary of its declared box."""


class ConfigError(RegcharError):
    """An experiment configuration failed schema validation."""

"""Exception types shared across the package."""


class CsshashError(Exception):
    """Base class for all package errors."""


class DimensionError(CsshashError, ValueError):
    """Operands have non-conforming shapes or lengths."""


class SingularError(CsshashError, ArithmeticError):
    """A square GF(2) matrix has no inverse."""


class ParameterError(CsshashError, ValueError):
    """Protocol or estimator parameters are invalid."""


class DomainError(CsshashError, ValueError):
    """A numeric argument lies outside the function's domain."""


class CapacityError(CsshashError, MemoryError):
    """A dense object or enumeration would exceed the configured cap."""


class PreconditionError(CsshashError, ValueError):
    """Inputs violate an operation's algebraic precondition."""

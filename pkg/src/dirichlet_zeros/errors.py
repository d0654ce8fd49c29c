"""Exception types shared by every module.

The command line maps these onto exit codes (domain 2, precision 3).
"""


class DirichletZerosError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DirichletZerosError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class PrecisionError(DirichletZerosError, ArithmeticError):
    """The requested accuracy cannot be certified with the configured budget."""


class DegeneracyError(DomainError):
    """A series operation hit a zero leading coefficient."""


class ResourceError(DirichletZerosError, MemoryError):
    """A request exceeds a hard resource cap."""

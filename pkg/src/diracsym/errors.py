"""Exception hierarchy shared by the library and the command-line front end."""


class DiracSymError(Exception):
    """Base class for all package errors."""


class UsageError(DiracSymError, ValueError):
    """Bad arguments, mode mismatches or invalid configuration."""


class ConstraintViolation(UsageError):
    """A coupling/momentum combination violates a symmetry requirement.

    ``condition`` names the violated requirement, e.g. ``"λ×p̂ψ=0"``.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DomainError(DiracSymError, ValueError):
    """Input outside the domain where a quantity is defined (e.g. p = 0)."""


class CertificateError(DiracSymError, ValueError):
    """A matrix condition fails; ``certificate`` holds the offending entry."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NumericalFailure(DiracSymError, RuntimeError):
    """A numerical procedure did not converge or produced invalid output."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

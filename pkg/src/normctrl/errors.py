"""Exception taxonomy shared by the library, the service and the CLI.

The CLI maps these onto exit codes: malformed input -> 2, mathematical
precondition failures -> 3, non-convergence -> 4.
"""


class NormctrlError(Exception):
    """Base class for all library errors."""


class MalformedInputError(NormctrlError):
    """A file or payload does not match the documented wire format."""


class ParameterError(NormctrlError):
    """A numeric parameter violates an operation's precondition."""


class StructuralError(NormctrlError):
    """Operands are structurally incompatible (window mismatch, non-Hermitian
    input, broken norm nesting)."""


class NotInvertibleError(NormctrlError):
    """The matrix or function is singular within working tolerance."""


class ConvergenceError(NormctrlError):
    """An iteration failed to converge within its budget."""

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


class GenerationError(NormctrlError):
    """A generator's scaling loop failed to reach its target."""


class CertificationError(NormctrlError):
    """An internally verified certificate inequality failed; indicates a bug
    or numerically hostile input rather than a user error."""

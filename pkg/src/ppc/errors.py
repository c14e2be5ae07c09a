"""Exception hierarchy shared by all engine modules."""

from __future__ import annotations


class PpcError(Exception):
    """Base class for all errors raised by this package."""


class DivisionAtSingularPoint(PpcError):
    """Division by a value below the pole tolerance (1e-300)."""


class DomainError(PpcError):
    """log/sqrt evaluated outside their real domain."""


class ExprSyntaxError(PpcError):
    """Expression text failed to parse.

    Carries the byte offset of the failure and the set of expected tokens.
    """

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        super().__init__(f"{message} at offset {offset}"
                         + (f" (expected {', '.join(expected)})" if expected else ""))
        self.offset = offset
        self.expected = expected


class UnknownFunction(PpcError):
    """Function name outside the supported set."""


class UnboundIdentifier(PpcError):
    """Identifier is neither a coordinate nor bound to a constant."""


class FrameNotInvertible(PpcError):
    """Realized frame vectors are linearly dependent at the sample point."""


class NotApplicable(PpcError):
    """Operation invoked in a mode it does not support."""


class PreconditionViolated(PpcError):
    """A stated precondition failed; message carries the offending residual."""


class ConstraintViolated(PpcError):
    """Darboux constraint a*c - b^2 - c*y^2 = -1 broken at a sample point."""


class SingularMetric(PpcError):
    """Chart metric not invertible at the sample point."""


class ZeroParameter(PpcError):
    """Parameter required to be nonzero was zero."""


class ZeroAlpha(ZeroParameter):
    """alpha = 0 degenerates the explicit chart example."""


class ZeroC(ZeroParameter):
    """C = 0 is not admissible in the frame-gauge probe."""


class SchemaError(PpcError):
    """Spec file is malformed or incomplete; message names the missing item."""


class VariantMismatch(PpcError):
    """Command not applicable to the spec file's structure variant."""

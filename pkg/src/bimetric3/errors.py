"""Exception hierarchy shared by all modules."""


class BimetricError(Exception):
    """Base class for all errors raised by this package."""


class ModeMismatchError(BimetricError):
    """Exact and float values were mixed without an explicit conversion."""


class SingularMatrixError(BimetricError):
    """Matrix inversion was requested for a (numerically) singular matrix."""


class InvalidSignatureError(BimetricError):
    """The first metric does not have signature (+,-,-)."""

    def __init__(self, signature, expected=(1, 2, 0)):
        self.signature = tuple(signature)
        self.expected = tuple(expected)
        super().__init__(
            "signature (%d,%d,%d), expected (%d,%d,%d)"
            % (self.signature + self.expected)
        )


class PreconditionViolated(BimetricError):
    """An operation was called outside its documented domain."""


class InternalInvariantViolation(BimetricError):
    """A structural fact guaranteed by the theory failed to hold.

    Signals either a bug or an invalid input that escaped validation.
    """


class ResidualTooLarge(BimetricError):
    """A constructed transformation failed its residual tolerance."""

    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__(f"residual {residual:.3e} exceeds tolerance {tol:.3e}")


class AmbiguousClassification(BimetricError):
    """A float-mode discrete invariant fell inside its tolerance band."""


class InvalidParamsError(BimetricError):
    """Canonical-form parameters violate the side conditions of the class."""


class InvalidInputError(BimetricError):
    """An input document failed to parse or validate."""

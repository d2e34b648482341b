"""Exception hierarchy for the engine.

Every operation-level failure mode has its own class so callers (and the
CLI harness) can report precisely what went wrong.
"""


class C2HomError(Exception):
    """Base class for all engine errors."""


class BaseMismatch(C2HomError):
    """Operands live over different base rings."""


class IllFormedHom(C2HomError):
    """A matrix does not carry source relations into target relations."""


class MissingArgument(C2HomError):
    """A constructor was called without a required argument."""


class NotAnInvolution(C2HomError):
    """The supplied endomorphism does not square to the identity."""


class NotAGreenBase(C2HomError):
    """The functor supplied as a tensor base is not a valid Green base."""


class NotGreenModule(C2HomError):
    """Operation requires a module over the constant Green functor."""


class NotEquivariant(C2HomError):
    """A pair of level maps does not commute with res, tr and w."""


class NotFinite(C2HomError):
    """Operation requires a levelwise finite Mackey functor."""


class WindowTooSmall(C2HomError):
    """Requested degree falls outside the range where homology is trusted."""


class LengthTooShort(C2HomError):
    """A capped resolution does not reach the requested reading degree."""


class NonNestedTower(C2HomError):
    """Tower stages and structure maps do not line up."""


class NotSigmaSums(C2HomError):
    """Input is not a valid sum of sigma-shifted constant pieces."""


class UnsupportedBase(C2HomError):
    """The base ring is outside the class supported by this model."""


class ZeroPowerMap(C2HomError):
    """The power-map parameter must be a nonzero integer."""


class UnknownCase(C2HomError):
    """Requested verification case is not registered."""


class InvalidParams(C2HomError):
    """Case parameters failed validation."""


class ParseError(C2HomError):
    """JSON text could not be parsed; carries the character position."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class SchemaError(C2HomError):
    """JSON was well-formed but violates the codec schema; names the field."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

"""Exception hierarchy shared by all ringeq modules."""


class RingEqError(Exception):
    """Base class for every error raised by ringeq."""


class ValidationError(RingEqError, ValueError):
    """An object violates a structural invariant."""


class DuplicateVertex(ValidationError):
    pass


class UnknownTerminal(ValidationError):
    pass


class DuplicateDemand(ValidationError):
    pass


class SelfLoopDemand(ValidationError):
    pass


class ProfileShapeMismatch(ValidationError):
    pass


class ParseError(ValidationError):
    """Malformed input document; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class SearchSpaceTooLarge(RingEqError):
    pass


class NotApplicable(RingEqError):
    """A construction's precondition does not hold for the given instance."""


class NotStrict(RingEqError):
    pass


class Rejected(RingEqError):
    """An edge contraction would make the demand digraph non-simple."""


class SizeBound(RingEqError):
    pass


class RelabelFailed(RingEqError, AssertionError):
    """Internal invariant broken: no relabeling satisfies the construction."""


class CycleBoundExceeded(UserWarning):
    """Cycle enumeration was truncated by the length bound."""

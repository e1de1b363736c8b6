"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class SecatError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateElement(SecatError):
    pass


class UnknownElement(SecatError):
    pass


class CycleError(SecatError):
    """The input relation is not antisymmetric.  Carries one offending pair."""

    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"relation has a cycle through {pair[0]!r} and {pair[1]!r}")


class NotMonotone(SecatError):
    """A map fails to preserve order.  Carries one violating pair."""

    def __init__(self, pair, detail=""):
        self.pair = pair
        msg = f"map does not preserve the order on pair ({pair[0]!r}, {pair[1]!r})"
        if detail:
            msg += ": " + detail
        super().__init__(msg)


class SizeLimit(SecatError):
    """A constructed space or complex would exceed the configured size cap."""


class MismatchedSignature(SecatError):
    """Two maps were combined but their domains or codomains disagree."""


class EmptyBase(SecatError):
    """Cospans must have a nonempty base space."""


class NotConnected(SecatError):
    """An invariant that requires a connected space got a disconnected one."""


class EmptySubset(SecatError):
    """An invariant that needs a nonempty subset got the empty one."""


class SearchBudgetExceeded(SecatError):
    """An exhaustive search hit its node budget before reaching a verdict.

    ``bracket`` holds the best (lower, upper) bounds proven so far, when the
    interrupted search was a cover minimisation.
    """

    def __init__(self, msg, budget=None, bracket=None):
        self.budget = budget
        self.bracket = bracket
        super().__init__(msg)


class EngineTimeout(SecatError):
    """Wall-clock deadline hit.  ``bracket`` as in SearchBudgetExceeded."""

    def __init__(self, msg, bracket=None):
        self.bracket = bracket
        super().__init__(msg)


class CrossCheckMismatch(SecatError):
    """Two independent routes to the same value disagreed.  Always a bug."""


class ParseError(SecatError):
    """An instance file is malformed.  Message carries location context."""


class ValidationError(SecatError):
    """Semantically invalid input (bad reference, bad certificate, ...)."""


class CertificateError(ValidationError):
    """A certificate failed independent re-validation."""

"""Exception hierarchy shared by the whole package.

Two top-level families matter for exit codes: ``InputError`` (malformed or
infeasible user input, CLI exit 1) and ``InternalConsistencyError`` (a
mathematical guarantee failed to hold numerically, CLI exit 2).  Negative
verdicts are *data*, never exceptions.
"""

from __future__ import annotations


class GcbaKitError(Exception):
    """Base class for all package errors."""


class InputError(GcbaKitError):
    """Malformed input or violated operation precondition."""


class ParseError(InputError):
    """Space or point description could not be parsed."""


class SpaceValidationError(InputError):
    """A space description failed a structural invariant."""


class PreconditionError(InputError):
    """An operation was called outside its stated preconditions."""


class RetractionConstantError(InputError):
    """The supplied openness constant is too large for the configuration."""


class InternalConsistencyError(GcbaKitError):
    """A quantity two independent routes must agree on disagreed, or a
    proved property failed numerically."""


class NoWitnessError(InternalConsistencyError):
    """A search that theory guarantees to succeed found nothing at
    tolerance; carries the falsifying instance for inspection."""

    def __init__(self, message: str, instance=None):
        super().__init__(message)
        self.instance = instance

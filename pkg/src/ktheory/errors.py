"""Exception hierarchy shared by every module and mapped to CLI exit codes."""

from __future__ import annotations


class KTheoryError(Exception):
    """Base class for all errors raised by the workbench."""


class InputError(KTheoryError, ValueError):
    """The caller handed us something outside an operation's domain."""


class VerificationError(KTheoryError):
    """A computed object failed one of its defining checks.

    ``diagnostic`` names what failed (an entry, a grid node, an invariant).
    """

    def __init__(self, message: str, diagnostic: object = None):
        super().__init__(message)
        self.diagnostic = diagnostic if diagnostic is not None else message


class ResolutionError(VerificationError):
    """Sampling is too coarse for the requested numerical invariant."""

"""Exception taxonomy mapped onto the CLI exit-code contract."""

from __future__ import annotations


class UsageError(Exception):
    """Invalid configuration or parameters (CLI exit code 1)."""


class ResourceLimitError(UsageError):
    """Requested many-body size exceeds the oracle cap (CLI exit code 1)."""


class VerificationFailure(Exception):
    """A scientific cross-check failed its tolerance (CLI exit code 2)."""

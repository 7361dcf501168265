"""Shared exception hierarchy.

Validation errors map to CLI exit code 2, everything else to 1.
"""


class TagcapError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(TagcapError):
    """Bad input data or arguments."""

"""Domain errors raised by the reduction pipeline.

Malformed input is reported with django's ValidationError; the classes here
cover the failures that are not the caller's input being wrong.
"""
from __future__ import annotations


class ResourceLimitExceeded(Exception):
    """A configured oracle, search, projection or conflict budget ran out."""

    def __init__(self, resource: str, limit: int) -> None:
        super().__init__(f"{resource} limit of {limit} exceeded")
        self.resource = resource
        self.limit = limit


class WitnessDriftError(Exception):
    """The encoder and the witness construction disagree."""


class ExternalSolverError(Exception):
    pass

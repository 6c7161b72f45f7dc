"""Exception hierarchy for the Congested Clique simulator.

Every error carries the process exit code the command-line front-end uses
when the error escapes a command.
"""

from __future__ import annotations

import config


class CliqueSimError(Exception):
    """Base class for all simulator errors."""

    exit_code: int = config.EXIT_INVALID_INPUT


# ------------------------------
# Model violations (a bug in a protocol)
# ------------------------------


class ProtocolError(CliqueSimError):
    """A protocol broke a rule of the round model."""

    exit_code = config.EXIT_PROTOCOL_VIOLATION


class BudgetViolation(ProtocolError):
    """Payload above the per-message budget, or two messages on one ordered pair."""


class LoadViolation(ProtocolError):
    """A Lenzen batch where some vertex sources or receives more than n messages."""


class NonTermination(ProtocolError):
    """The round cap was exceeded."""


class Stall(ProtocolError):
    """A vertex waited longer than any acyclic orientation allows."""


# ------------------------------
# Invalid input
# ------------------------------


class InvalidSpec(CliqueSimError):
    """A graph family specification with unusable parameters."""


class ParseError(CliqueSimError):
    """A malformed graph, solution or configuration file."""


class GraphIoError(CliqueSimError):
    """A file could not be read or written."""


class TooLarge(CliqueSimError):
    """An exponential oracle was asked about a graph that is too big."""


class InvalidParameters(CliqueSimError):
    """Algorithm parameters outside the range the procedure supports."""


class SparsePreconditionFailed(CliqueSimError):
    """The residual graph after peeling is too dense: the arboricity promise is too small."""

"""Domain errors raised by the cogstream modules.

Each class name doubles as the error token the CLI prints on stderr before
exiting with status 1, so the names stay short and condition-like.
"""


class CogstreamError(Exception):
    """Base class for every domain error in this package."""


# --- reading-speed models -------------------------------------------------

class EmptyOrSingleton(CogstreamError):
    """A sample of fewer than two observations cannot be fitted or tested."""


class NonPositiveSample(CogstreamError):
    """Reading speeds must be strictly positive."""


class DegenerateSample(CogstreamError):
    """All observations identical; the log-scale spread would be zero."""


class NegativeSpeed(CogstreamError):
    """A streaming speed below zero has no meaning."""


class AlphaOutOfRange(CogstreamError):
    """Quantile levels live in (0, 1); allocation skew lives in [0, 1]."""


class LengthMismatch(CogstreamError):
    """Paired observations must come in equal-length sequences."""


class DegenerateDifferences(CogstreamError):
    """All paired differences identical; the t statistic is undefined."""


class IdenticalModels(CogstreamError):
    """Two identical densities intersect everywhere, not at isolated points."""


# --- savings and redistribution --------------------------------------------

class BadProportions(CogstreamError):
    """Group proportions (or population shares) must sum to one."""


class NonPositiveSmax(CogstreamError):
    """The reference full-throughput speed must be positive."""


class InfeasibleSplit(CogstreamError):
    """The requested split drives the other group's speed below zero."""


# --- text scoring -----------------------------------------------------------

class EmptyText(CogstreamError):
    """Readability indices need at least one word."""


# --- allocation --------------------------------------------------------------

class EmptySessionSet(CogstreamError):
    """Cannot allocate a budget over zero sessions."""


class NonPositiveBudget(CogstreamError):
    """The shared budget must be strictly positive."""


class ScoreOutOfRange(CogstreamError):
    """Cognitive-load scores are integers from 1 (hardest) to 10 (easiest)."""


class UnknownSession(CogstreamError):
    """The referenced session id is not part of the current plan."""


class DuplicateSession(CogstreamError):
    """Session ids within one plan must be unique."""


class InfeasibleFloor(CogstreamError):
    """n * min_wps exceeds the budget; the floor cannot be honoured."""


# --- staircase calibration ----------------------------------------------------

class BadConfig(CogstreamError):
    """Staircase configuration violates its invariants."""


class AlreadyConverged(CogstreamError):
    """A converged staircase accepts no further input."""


class TooEarly(CogstreamError):
    """The comfort option is not available before seven adjustments."""


# --- simulation ----------------------------------------------------------------

class MissingScores(CogstreamError):
    """The chosen estimation method needs data the passage does not carry."""


class Unreachable(CogstreamError):
    """No finite budget can reach the requested alignment target."""


class DegenerateVariance(CogstreamError):
    """Correlation is undefined when one variable never varies."""


# --- streaming server ------------------------------------------------------------

class UnknownPassage(CogstreamError):
    """The requested passage id is not in the server's corpus."""


class CapacityExceeded(CogstreamError):
    """The server is at its configured session limit."""


class NotPaused(CogstreamError):
    """Feedback is only accepted while a calibration pause is active."""


class SameTooEarly(CogstreamError):
    """The comfort choice arrived before it was ever offered."""


class ClientGone(CogstreamError):
    """The peer disconnected mid-session."""

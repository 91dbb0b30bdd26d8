"""Exception hierarchy shared by all nrec modules.

Exit-code mapping used by the CLI:
  2 -> usage / parameter errors
  3 -> resource guards (memory limits, step budgets)
"""


class NrecError(Exception):
    """Base class for all nrec errors."""

    exit_code = 2


class WindowSizeError(NrecError):
    """Window length does not match the equation's memory length."""


class CoefficientOverflowError(NrecError):
    """Worst-case potential would not fit in a signed 64-bit integer."""


class CycleNotFound(NrecError):
    """No repetition found within the step budget."""

    exit_code = 3


class NoPrimesInInterval(NrecError):
    """The open interval (2m, 3m) contains no prime."""


class ThetaTooSmall(NrecError):
    """theta must be at least 2m."""


class IndexOutOfRange(NrecError):
    """Prime index outside [0, s-1]."""


class R1Collision(NrecError):
    """Two R1 multiple-sets intersect; the coef_3 case analysis is ambiguous."""


class SOutOfRange(NrecError):
    """coef_3 requires s >= 2 (even) or s >= 3 (odd)."""


class NotCoprime(NrecError):
    """The two chain steps are not relatively prime."""


class MemoryGuard(NrecError):
    """Exact census refused: state space exceeds the configured limit."""

    exit_code = 3


class MTooSmall(NrecError):
    """Bifurcation sweep requires m >= 8."""


class InvalidShapeParam(NrecError):
    """Bad parameter for a classic coefficient-shape check."""


class CheckpointMismatch(NrecError):
    """Checkpoint file does not match the requested computation."""

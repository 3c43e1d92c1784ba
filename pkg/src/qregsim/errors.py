class QRegError(Exception):
    """Base class for errors raised by qregsim."""


class RegisterError(QRegError, ValueError):
    """Bad qubit index, basis index, occupation list or shape mismatch."""


class NormalizationError(QRegError):
    """A Born-rule query on a state whose norm is not 1 within tolerance."""


class RuleError(QRegError, ValueError):
    """Malformed transition rule or stage."""


class ProgramError(QRegError, ValueError):
    """Invalid experiment program (indices out of range, duplicate names)."""

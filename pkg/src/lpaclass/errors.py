"""Exception hierarchy shared by every module."""


class LpaError(Exception):
    """Base class for domain errors (CLI maps these to exit status 1)."""


class GraphFormatError(LpaError, ValueError):
    """Malformed graph, matrix or certificate document."""


class MoveError(LpaError, ValueError):
    """A graph move was requested where it is not legal."""


class PreconditionError(LpaError, ValueError):
    """Parameters outside the range an operation accepts."""


class TorsionCapExceeded(LpaError):
    """Automorphism brute force refused: torsion subgroup too large."""


class SizeCapExceeded(LpaError):
    """Graph too large for factorial canonicalization or enumeration."""

"""Exception hierarchy shared by all modules."""


class TrieSmoothError(Exception):
    """Base class for every error raised by this package."""


class AlphabetError(TrieSmoothError, ValueError):
    """Unknown symbol, duplicate symbol, or strings over different alphabets."""


class PfaFormatError(TrieSmoothError, ValueError):
    """A PFA description could not be parsed (unknown names, bad JSON shape)."""


class StarLikeError(TrieSmoothError, ValueError):
    """The automaton violates one of the star-like or canonical-form clauses."""

    def __init__(self, clause, message):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class HypothesisError(TrieSmoothError, ValueError):
    """An analysis was requested on an automaton outside its hypothesis class."""


class NumericError(TrieSmoothError, ArithmeticError):
    """Root finding failed to reach the requested tolerance."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class InputUnderrunError(TrieSmoothError, ValueError):
    """A finite input string is shorter than the sampling budget requires."""


class EnumerationSizeError(TrieSmoothError, ValueError):
    """Exact enumeration over all strings of a length would be too large."""

"""Exception hierarchy.

Every error raised on bad input derives from :class:`MacjscError`, which is
itself a ``ValueError`` so callers that only care about "bad input" can catch
that.
"""


class MacjscError(ValueError):
    pass


class NegativeProbability(MacjscError):
    pass


class NotNormalized(MacjscError):
    pass


class ShapeMismatch(MacjscError):
    pass


class UnknownVariable(MacjscError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class NameCollision(MacjscError):
    pass


class OverlappingSets(MacjscError):
    pass


class AlphabetMismatch(MacjscError):
    pass


class MissingParam(MacjscError):
    pass


class NotOrthogonal(MacjscError):
    pass


class DegenerateRho(MacjscError):
    pass


class ZeroVarianceComponent(MacjscError):
    pass


class SymbolNotCovered(MacjscError):
    pass


class OptimizerDiverged(MacjscError, RuntimeError):
    pass


class BudgetExceeded(MacjscError):
    """Raised when a toy-scale codebook or search would not fit the budget."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class EncodingFailure(Exception):
    """No codeword is jointly typical with the source block (event E1)."""


class DecodeError(Exception):
    """Joint-typicality decoding found no candidate or more than one.

    ``kind`` is ``"none"`` or ``"ambiguous"``.
    """

    def __init__(self, kind, candidates=()):
        super().__init__(kind)
        self.kind = kind
        self.candidates = tuple(candidates)

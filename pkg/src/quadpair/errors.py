"""Shared exception types."""


class QuadpairError(Exception):
    """Base class for library-specific failures."""


class PrecisionError(QuadpairError):
    """A certified interval is too wide to decide a comparison.

    Callers that built the input from an alpha spec should retry with more
    fractional bits (see exactreal.eval_with_retry).
    """


class CostGuardError(QuadpairError):
    """Input exceeds a documented desk-scale cost guard."""


class BudgetError(QuadpairError):
    """The interval-measure budget precondition failed in strict mode."""


class EmptyRefinementError(QuadpairError):
    """A refinement step emptied the candidate set."""

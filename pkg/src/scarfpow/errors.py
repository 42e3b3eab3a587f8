"""Shared exception types."""


class BudgetError(RuntimeError):
    """A face/lattice/generator budget would be exceeded.

    Raised loudly instead of truncating results; callers may retry with an
    explicit override budget.
    """


class UnsupportedIdealError(ValueError):
    """Input ideal outside the supported regime (e.g. colliding r-fold products)."""

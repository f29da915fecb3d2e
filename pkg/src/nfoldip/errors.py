"""Exception hierarchy for the solver.

All arithmetic in this package runs on Python's unbounded integers (the
numpy fast paths are guarded by a-priori magnitude bounds and fall back to
exact Python arithmetic), so overflow never surfaces as a wrong number.
What can go wrong instead: malformed input, and computations whose output
is simply too large for the configured budgets.  The latter raise
ResourceLimitError so callers can distinguish "too big" from "wrong".
"""

from __future__ import annotations


class NFoldError(Exception):
    """Base class for all errors raised by this package."""


class InputError(NFoldError, ValueError):
    """Malformed or inconsistent input (dimensions, bounds, schema)."""


class ResourceLimitError(NFoldError, RuntimeError):
    """A configured budget was exceeded before the answer was known.

    Attributes:
        limit_name: which budget tripped (e.g. "max_elements").
        limit_value: the configured value.
        hint: how to proceed (e.g. the CLI flag that overrides the limit).
    """

    def __init__(self, message: str, *, limit_name: str = "", limit_value: int | None = None,
                 hint: str = ""):
        super().__init__(message)
        self.limit_name = limit_name
        self.limit_value = limit_value
        self.hint = hint

    def __str__(self) -> str:
        base = super().__str__()
        if self.hint:
            return f"{base} ({self.hint})"
        return base


class IterationLimitError(NFoldError, RuntimeError):
    """The augmentation safety cap was reached.

    This is a diagnostic failure: the solver refuses to report "Optimal"
    when the iteration count contradicts the expected descent behaviour.
    """

"""Exception types shared across the package."""


class PosetFormatError(ValueError):
    """Malformed ``.poset`` text."""


class FamilyFormatError(ValueError):
    """Malformed ``.fam`` text."""


class CycleError(ValueError):
    """A relation that should be a strict order contains a cycle."""


class PreconditionError(ValueError):
    """An operation was called on input outside its domain."""


class SaturationError(RuntimeError):
    """No height-preserving insertion was found while saturating.

    Every tree poset should admit one, so this signals a genuine
    counterexample and is reported loudly rather than papered over.
    """


class WindowTooSmall(ValueError):
    """The truncated Mon(Z) window cannot host the requested construction."""


class SearchBudgetExceeded(RuntimeError):
    """A time-budgeted search ran out of time before finishing."""

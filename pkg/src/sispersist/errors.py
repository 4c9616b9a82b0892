"""Exception types shared across the package."""


class SpecError(ValueError):
    """A model specification violates a structural constraint."""


class SubcriticalError(SpecError):
    """An endemic-regime quantity was requested for a spec with r0 <= 1."""


class MixedHeterogeneityError(SpecError):
    """A closed-form route needs one of infectivity or susceptibility uniform."""


class DegreeBalanceError(SpecError):
    """A degree distribution has unequal mean in- and out-degree."""


class StateSpaceError(ValueError):
    """The exact state space exceeds the configured size cap."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoExtinctionsError(RuntimeError):
    """No simulated replicate went extinct inside the observation window."""

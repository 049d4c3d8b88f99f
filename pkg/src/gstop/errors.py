"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(EngineError):
    """A domain object or argument violates its declared invariants."""


class StabilityError(EngineError):
    """An explicit step would violate the monotone-scheme stability bound.

    Carries the offending node and the largest admissible step length so
    callers can resize their time grid.
    """

    def __init__(self, message: str, *, node_index: int, state: float,
                 dt: float, required_dt: float):
        super().__init__(message)
        self.node_index = node_index
        self.state = state
        self.dt = dt
        self.required_dt = required_dt


class BudgetError(EngineError):
    """A combinatorial or cost cap would be exceeded; carries an estimate."""

    def __init__(self, message: str, *, estimate: int, budget: int):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class EngineFaultError(EngineError):
    """An internal self-check failed; indicates an implementation fault."""


class ConfigError(EngineError):
    """A run configuration is invalid; carries the offending field."""

    def __init__(self, message: str, *, field: str = ""):
        super().__init__(message)
        self.field = field

"""Exception hierarchy shared by the library and the CLI."""


class ModelError(ValueError):
    """Base class for every error raised by the model."""


class InvalidScenario(ModelError):
    """A scenario parameter is missing, non-positive or violates an ordering."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class FastTargetError(ModelError):
    """Operation needs a target slower than the searcher (U < V)."""


class RegimeError(ModelError):
    """Operation is not defined for the scenario's regime."""


class DomainError(ModelError):
    """Argument lies outside the geometric domain of the formula."""


class DegenerateError(ModelError):
    """Interpolation or ratio with a vanishing denominator."""


class ConvergenceError(ModelError):
    """A numerical kernel exhausted its iteration budget."""


class StepSizeError(ModelError):
    """Simulation time step is too coarse for the scenario."""

"""Exception hierarchy shared by the solvers, the oracle and the CLI."""


class ModelError(Exception):
    """Base class for every error raised by this package."""


class DivergentIntegralError(ModelError, ValueError):
    pass


class RootBracketError(ModelError, ValueError):
    """No sign change was found; ``trace`` holds the scanned (x, f(x)) pairs."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class ConvergenceError(ModelError, RuntimeError):
    """An iterative method ran out of budget; ``trace`` holds its iterates."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class DimensionBudgetError(ModelError, ValueError):
    pass


class DegenerateSolutionError(ModelError):
    pass


class NoSolutionError(ModelError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ToleranceError(ModelError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

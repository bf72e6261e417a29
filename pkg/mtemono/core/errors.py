from typing import Optional


class MteMonoError(ValueError):
    """Base class for domain errors. Subclasses ValueError so callers that
    already guard against bad input keep working."""


class PopulationError(MteMonoError):
    pass


class NormalizationError(PopulationError):
    pass


class UndefinedParameterError(MteMonoError):
    """A treatment parameter whose conditioning event has (numerically) zero mass."""


class SupportError(MteMonoError):
    pass


class IdentityError(MteMonoError):
    """Integral form and closed form of an estimand disagree."""


class FitError(MteMonoError):
    pass


class SampleError(MteMonoError):
    pass


class InfeasibleConfigError(MteMonoError):
    pass


class ScenarioError(MteMonoError):
    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        return {
            "type": type(self).__name__,
            "message": str(self),
            "field": self.field,
            "line": self.line,
            "column": self.column,
        }


class TaskError(MteMonoError):
    """A scenario task failed after the scenario itself validated."""

    def __init__(self, task: str, cause: Exception):
        super().__init__(f"task '{task}' failed: {cause}")
        self.task = task
        self.cause = cause

    def to_dict(self) -> dict:
        return {
            "type": type(self.cause).__name__,
            "message": str(self),
            "field": self.task,
            "line": None,
            "column": None,
        }

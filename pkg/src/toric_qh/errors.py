"""Exception types shared across the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for every error raised by :mod:`toric_qh`."""


class DegenerateIterate(ToolkitError, ValueError):
    """The iterate ``Phi^k`` has eigenvalue 1 in block ``i``."""

    def __init__(self, i: int, k: int) -> None:
        super().__init__(f"iterate k={k} is degenerate in block {i}")
        self.i = i
        self.k = k


class HorizonExceeded(ToolkitError):
    def __init__(self, horizon: int) -> None:
        super().__init__(f"no lemma witness found for k <= {horizon}")
        self.horizon = horizon


class IncompatiblePeriodGroup(ToolkitError, ValueError):
    pass


class DivisionByZero(ToolkitError, ZeroDivisionError):
    pass


class CutoffError(ToolkitError, ValueError):
    """A comparison was requested below the precision a series carries."""


class SpecMismatch(ToolkitError, ValueError):
    pass


class ParityViolation(ToolkitError, ValueError):
    pass


class MalformedBetti(ToolkitError, ValueError):
    pass


class CacheCorrupt(ToolkitError):
    pass


class ScenarioError(ToolkitError, ValueError):
    pass


class PipelineError(ToolkitError):
    """Wraps a failure inside :func:`toric_qh.pipeline.run_pipeline` with the stage name."""

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause

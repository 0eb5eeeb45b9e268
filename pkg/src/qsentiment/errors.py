"""Exception hierarchy.

The CLI maps these to exit codes: ``ConfigError`` -> 1, ``DatasetError`` -> 2,
``ConvergenceError`` -> 3.
"""


class QSentimentError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(QSentimentError):
    """Invalid configuration, rule pattern, stop-word file or argument."""


class DatasetError(QSentimentError):
    """Malformed or unusable input data."""


class StructureError(QSentimentError):
    """A data structure (decomposition, circuit, model) is internally inconsistent."""


class ConvergenceError(QSentimentError):
    """An iterative solver stopped before meeting its tolerance."""


class StageError(QSentimentError):
    """Wraps an error raised inside one pipeline stage.

    ``stage`` names the stage, ``config`` is the echoed experiment config and
    ``__cause__`` holds the original exception.
    """

    def __init__(self, stage, cause, config=None):
        self.stage = stage
        self.cause = cause
        self.config = config
        super().__init__(f"stage '{stage}' failed: {type(cause).__name__}: {cause}")

"""Exception hierarchy.

Two families matter to callers: ``ValidationError`` (bad inputs, configs,
files; CLI exit code 1) and ``AnalysisError`` (a stage could not produce a
result from valid input; CLI exit code 2).
"""


class PunctstatError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PunctstatError):
    pass


class AnalysisError(PunctstatError):
    pass


# -- input / validation ------------------------------------------------------

class DocumentIOError(ValidationError, OSError):
    pass


class EncodingError(ValidationError, UnicodeError):
    pass


class EmptyDocumentError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyLexiconError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class PolicyError(ValidationError):
    pass


# -- analysis ----------------------------------------------------------------

class ScriptMismatchError(AnalysisError):
    pass


class NoBoundariesError(AnalysisError):
    pass


class EmptyInputError(AnalysisError):
    pass


class RangeTooSmallError(AnalysisError):
    pass


class DomainError(AnalysisError, ValueError):
    pass


class SampleTooSmallError(AnalysisError):
    pass


class FitDivergedError(AnalysisError):
    pass


class DegenerateSupportError(AnalysisError):
    pass


class SeriesTooShortError(AnalysisError):
    pass


class ScaleOutOfRangeError(AnalysisError):
    pass


class ZeroVarianceError(AnalysisError):
    def __init__(self, scale: int, window: int):
        self.scale = scale
        self.window = window
        super().__init__(
            f"detrended variance vanishes at scale {scale}, window {window}; "
            "raise the minimum scale or lower the detrending order"
        )


class TooFewPointsError(AnalysisError):
    pass

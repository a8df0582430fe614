"""Exception hierarchy shared across the toolkit."""


class AngiotraceError(Exception):
    """Base class for all toolkit errors."""


# --- raster / I/O ---

class UnsupportedFormat(AngiotraceError):
    pass


class CorruptFile(AngiotraceError):
    pass


class ZeroDimension(AngiotraceError):
    pass


class IoFailure(AngiotraceError):
    pass


class OutOfBounds(AngiotraceError):
    pass


# --- filtering ---

class NonPositiveSigma(AngiotraceError):
    pass


class EvenSize(AngiotraceError):
    pass


class EvenWindow(AngiotraceError):
    pass


# --- segmentation ---

class DegenerateHistogram(AngiotraceError):
    pass


# --- edges ---

class InvalidThresholdOrder(AngiotraceError):
    pass


# --- tracking ---

class NoPath(AngiotraceError):
    pass


class UnknownNode(AngiotraceError):
    pass


class EmptyGraph(AngiotraceError):
    pass


# --- geometry ---

class TooFewPoints(AngiotraceError):
    pass


class DuplicateConsecutivePoints(AngiotraceError):
    pass


class ParameterOutOfRange(AngiotraceError):
    pass


class EmptyPath(AngiotraceError):
    pass


# --- pipeline ---

class StageError(AngiotraceError):
    """Wraps an error raised inside a pipeline stage with the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause

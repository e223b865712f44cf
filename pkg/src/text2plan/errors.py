"""Exception types. Every error carries a stable ``code`` string."""


class FloorplanError(Exception):
    code = "E_GENERIC"


class RangeError(FloorplanError, ValueError):
    code = "E_RANGE"


class DegenerateError(FloorplanError, ValueError):
    code = "E_DEGENERATE"


class CapacityError(FloorplanError, ValueError):
    code = "E_CAPACITY"


class ValidationError(FloorplanError, ValueError):
    code = "E_INVALID"


class EmptyConditionError(FloorplanError, ValueError):
    code = "E_EMPTY_CONDITION"


class EmptyInputError(FloorplanError, ValueError):
    code = "E_EMPTY_INPUT"


class NoJSONError(FloorplanError, ValueError):
    code = "E_NO_JSON"


class SchemaError(FloorplanError, ValueError):
    code = "E_SCHEMA"


class UnknownTypeError(FloorplanError, ValueError):
    code = "E_UNKNOWN_TYPE"


class ClientError(FloorplanError, RuntimeError):
    code = "E_CLIENT"


class GenerationFailedError(FloorplanError, RuntimeError):
    code = "E_GENERATION_FAILED"

    def __init__(self, message, last_error=None, attempts=0):
        super().__init__(message)
        self.last_error = last_error
        self.attempts = attempts


class NumericError(FloorplanError, FloatingPointError):
    code = "E_NUMERIC"


class CheckpointError(FloorplanError, ValueError):
    code = "E_CHECKPOINT"


class ConfigError(FloorplanError, ValueError):
    code = "E_CONFIG"


class ShapeError(FloorplanError, ValueError):
    code = "E_SHAPE"


class EmptyError(FloorplanError, ValueError):
    code = "E_EMPTY"


class DivergedError(FloorplanError, RuntimeError):
    code = "E_DIVERGED"


class CorpusIOError(FloorplanError, OSError):
    code = "E_IO"


class GenerationInfeasibleError(FloorplanError, RuntimeError):
    code = "E_GEN"


class TooLargeError(FloorplanError, ValueError):
    code = "E_TOO_LARGE"


class SmallSetError(FloorplanError, ValueError):
    code = "E_SMALL_SET"

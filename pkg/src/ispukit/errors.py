"""Exception types shared across the toolkit."""


class IspukitError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(IspukitError, ValueError):
    """Shapes of an input and a parameter set do not line up."""


class StreamDiscontinuityError(IspukitError, ValueError):
    """Acquisition indices are not consecutive; extractor state must be reset."""


class WidthError(IspukitError, ValueError):
    """A binary layer width violates the multiple-of-32 hardware rule."""


class DegenerateNeuronError(IspukitError, ValueError):
    """A batch-norm scale of exactly zero makes the folded threshold undefined."""


class ModelFormatError(IspukitError, ValueError):
    """Model container is malformed or uses an unsupported version."""


class ModelValidationError(IspukitError, ValueError):
    """Model payload is inconsistent with its declared architecture."""

    def __init__(self, message, layer_index=None):
        if layer_index is not None:
            message = f"layer {layer_index}: {message}"
        super().__init__(message)
        self.layer_index = layer_index


class MissingCalibrationError(IspukitError, LookupError):
    """No cycles-per-MAC entry for the requested architecture."""


class EvaluationError(IspukitError, ValueError):
    """Accuracy evaluation requested on a stream without ground-truth labels."""


class StreamParseError(IspukitError, ValueError):
    """A CSV input row could not be parsed."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number

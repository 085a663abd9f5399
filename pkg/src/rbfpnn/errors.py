"""Exception hierarchy.

Every error raised by the package derives from :class:`RBFPNNError`, and all
of them are ``ValueError`` subclasses so callers that only care about bad
input can catch that.
"""


class RBFPNNError(ValueError):
    pass


class ValidationError(RBFPNNError):
    """Input values are malformed (empty, non-finite, ...)."""


class DimensionError(RBFPNNError):
    """Component counts or sequence lengths do not line up."""


class ParameterError(RBFPNNError):
    """A numeric parameter is outside its admissible range."""


class CodecError(RBFPNNError):
    """Chromosome length does not match the network shape."""


class ConfigError(RBFPNNError):
    """Trainer or run configuration is invalid."""


class AnnealingError(RBFPNNError):
    """Non-positive temperature passed to an annealing step."""


class DataError(RBFPNNError):
    """Dataset file or split request cannot be satisfied."""


class UsageError(RBFPNNError):
    """An operation was called with an argument it cannot accept (e.g. empty sample list)."""


class NumericalError(RBFPNNError):
    """The objective became non-finite during training."""

    def __init__(self, message, generation=None):
        super().__init__(message)
        self.generation = generation


class MissingFileError(DataError):
    pass


class RaggedRowError(DataError):
    pass


class NonNumericError(DataError):
    pass


class LabelDomainError(DataError):
    pass

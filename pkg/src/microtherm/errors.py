"""Exception hierarchy shared by every module."""


class MicrothermError(Exception):
    """Base class for all library errors."""


class NotSquare(MicrothermError):
    pass


class NotHermitian(MicrothermError):
    pass


class NotDoublyStochastic(MicrothermError):
    pass


class ModelMismatch(MicrothermError):
    pass


class UnsupportedComposition(MicrothermError):
    pass


class UnsupportedModel(MicrothermError):
    """Raised when an operation is not defined for the given theory model."""


class NotComposite(MicrothermError):
    pass


class NotPure(MicrothermError):
    pass


class NotMicrocanonical(MicrothermError):
    """The model has no unique invariant (microcanonical) state."""


class NotMajorised(MicrothermError):
    pass


class LengthMismatch(MicrothermError):
    pass


class InvalidAlpha(MicrothermError):
    pass


class DimensionMismatch(MicrothermError):
    pass


class NotUnital(MicrothermError):
    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


class IrrationalWeights(MicrothermError):
    pass


class NonUniqueSpectrum(MicrothermError):
    pass


class NotNormalized(MicrothermError):
    pass


class PathDisagreement(MicrothermError):
    """Two independent computations of the same quantity disagree (a bug)."""


class InvalidState(MicrothermError):
    pass


class ParseError(MicrothermError):
    """Malformed JSON input for a model, state, channel or bipartite state."""

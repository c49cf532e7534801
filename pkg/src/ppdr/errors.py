"""Exception hierarchy shared by all ppdr modules."""


class PpdrError(Exception):
    """Base class for every error raised by this package."""


# -- linear algebra ---------------------------------------------------------

class NotSquareError(PpdrError):
    pass


class NotSymmetricError(PpdrError):
    pass


class NoConvergenceError(PpdrError):
    """Eigensolver or SMO iteration cap exceeded."""


class NotPositiveDefiniteError(PpdrError):
    """Cholesky hit a non-positive pivot; callers may retry with a larger ridge."""


class KTooLargeError(PpdrError):
    pass


class DimensionMismatchError(PpdrError):
    pass


# -- dataset ----------------------------------------------------------------

class SchemaMismatchError(PpdrError):
    pass


class EmptyAfterDroppingError(PpdrError):
    pass


class SingleCategoryColumnError(PpdrError):
    pass


class InsufficientSamplesError(PpdrError):
    pass


# -- scatter ----------------------------------------------------------------

class UnknownTargetError(PpdrError):
    pass


class EmptyClassError(PpdrError):
    pass


# -- projection -------------------------------------------------------------

class EmptyPencilError(PpdrError):
    """The pencil numerator is identically zero (degenerate target)."""


class LengthMismatchError(PpdrError):
    pass


# -- kernel / sanitizer -----------------------------------------------------

class EmptySampleSetError(PpdrError):
    pass


class SameClassError(PpdrError):
    pass


class ClassTooSmallError(PpdrError):
    pass


class UnsupportedKernelGradientError(PpdrError):
    """Analytic gradient is only available for the RBF kernel."""


class NotConvergedError(PpdrError):
    """Sanitization hit max_iters before the label flipped.

    Carries the partial trace so callers can retry with a random restart.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


# -- classifier -------------------------------------------------------------

class SingleClassInputError(PpdrError):
    pass


# -- evaluate / cli ---------------------------------------------------------

class EmptyReportError(PpdrError):
    pass


class ConfigError(PpdrError):
    pass

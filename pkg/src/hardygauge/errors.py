"""Exception hierarchy shared by all modules."""


class HardyGaugeError(Exception):
    """Base class for every error raised by this package."""


class InvalidGridError(HardyGaugeError, ValueError):
    pass


class NumericInputError(HardyGaugeError, ValueError):
    pass


class ResolutionError(HardyGaugeError, ValueError):
    """A requested degree, measure or truncation is not resolvable on the grid."""


class ShapeError(HardyGaugeError, ValueError):
    pass


class DomainError(HardyGaugeError, ValueError):
    pass


class NearBoundaryError(DomainError):
    pass


class NotLogIntegrableError(HardyGaugeError):
    """The modulus vanishes on too large a part of the grid."""

    def __init__(self, message, small_fraction=None):
        super().__init__(message)
        self.small_fraction = small_fraction


class VanishingModulusError(NotLogIntegrableError):
    """Raised by the factorization routines; signals the ``chi_E`` regime."""


class NormEvaluationError(HardyGaugeError):
    pass


class UnsupportedNormError(HardyGaugeError, ValueError):
    pass


class OptimizationFailure(HardyGaugeError):
    def __init__(self, message, best_lower_bound):
        super().__init__(message)
        self.best_lower_bound = best_lower_bound


class AxiomViolation(HardyGaugeError):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class NotHardyError(HardyGaugeError):
    """The input is not analytic to tolerance."""


class InverseUnboundedError(HardyGaugeError):
    pass


class DegenerateGeneratorError(HardyGaugeError, ValueError):
    pass


class InconsistentCrossCheckError(HardyGaugeError):
    """Distance verdict and log-integrability gate disagree."""

    def __init__(self, message, classification):
        super().__init__(message)
        self.classification = classification

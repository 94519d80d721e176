"""Exception hierarchy shared by all modules."""


class GainLearnError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GainLearnError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParameterError(DomainError):
    """Model parameters violate the maintained assumptions."""


class AssumptionError(DomainError):
    """A closed-form limit was requested outside the region where it exists."""


class IdentificationError(DomainError):
    """The requested quantity is not identified at these parameters (beta0 = 0)."""


class EstimationError(GainLearnError, ArithmeticError):
    """Numerical failure while fitting an estimator."""


class CollinearityError(EstimationError):
    """The regressor Gram matrix is (numerically) singular."""


class DegenerateRegressorError(EstimationError):
    """The generated regressor is identically zero."""

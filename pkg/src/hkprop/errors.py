"""Exception and warning types raised across the package."""


class HKError(Exception):
    """Base class for all errors raised by hkprop."""


class NotSymmetric(HKError, ValueError):
    pass


class RealPartNotPD(HKError, ValueError):
    pass


class ConvergenceFailure(HKError, ArithmeticError):
    pass


class InconsistentSeed(HKError, ValueError):
    pass


class ZeroCrossing(HKError, ArithmeticError):
    """A tracked square root hit a (numerically) zero argument."""


class UnresolvedWinding(HKError, ArithmeticError):
    """The sampling of a tracked path is too coarse to decide the branch."""


class UnknownModel(HKError, ValueError):
    pass


class NonFiniteState(HKError, ArithmeticError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class BadShape(HKError, ValueError):
    pass


class BoxTooSmall(HKError, ValueError):
    pass


class GridMismatch(HKError, ValueError):
    pass


class SingularFrame(HKError, ArithmeticError):
    pass


class BoundaryMass(HKError, ArithmeticError):
    pass


class ConfigError(HKError, ValueError):
    pass


class MassLeakWarning(UserWarning):
    """Phase-space coefficients do not decay toward the edge of the bundle grid."""

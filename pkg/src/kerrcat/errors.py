"""Exception types raised by kerrcat."""


class KerrCatError(Exception):
    """Base class for all package errors."""


class DesignError(KerrCatError, ValueError):
    """A circuit design violates its invariants."""


class BranchError(KerrCatError, ValueError):
    """A bias flux leaves the principal branch, cos(pi * flux) <= 0."""


class UnreachableTargetError(KerrCatError, ValueError):
    """A requested detuning cannot be produced by any principal-branch flux."""


class SingularMatrixError(KerrCatError, ValueError):
    pass


class DimensionMismatchError(KerrCatError, ValueError):
    pass


class DetuningTooSmallError(KerrCatError, ValueError):
    """The coupler detuning is too close to zero to divide by."""


class NoSignChangeError(KerrCatError, ValueError):
    pass


class ConvergenceError(KerrCatError, RuntimeError):
    """An iterative numerical method failed to converge."""


class StepSizeError(ConvergenceError):
    """The adaptive integrator step size underflowed."""


class HermiticityError(KerrCatError, ValueError):
    pass


class TruncationWarning(UserWarning):
    """A coherent state carries non-negligible weight beyond the Fock cutoff."""

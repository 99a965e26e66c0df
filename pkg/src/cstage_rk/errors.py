"""Exception types raised across the package."""


class CstageError(Exception):
    """Base class for all errors raised by this package."""


class DegreeTooLarge(CstageError, ValueError):
    pass


class OutOfInterval(CstageError, ValueError):
    pass


class EigenFailure(CstageError, RuntimeError):
    pass


class LengthMismatch(CstageError, ValueError):
    pass


class InvalidExtras(CstageError, ValueError):
    pass


class Inconsistent(CstageError, ValueError):
    """The matching equations have no solution.

    ``residual`` holds the largest right-hand side left over in rows that
    have no pivot.
    """

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class SymmetryUnsupported(CstageError, ValueError):
    pass


class MissingParameter(CstageError, KeyError):
    pass


class FamilyMismatch(CstageError, ValueError):
    pass


class UnknownName(CstageError, KeyError):
    pass


class NoConvergence(CstageError, RuntimeError):
    """Stage iteration did not reach the requested tolerance.

    ``step`` is filled in by :func:`cstage_rk.integrator.integrate` with the
    index of the failing step.
    """

    def __init__(self, iterations, last_increment, step=None):
        self.iterations = iterations
        self.last_increment = last_increment
        self.step = step
        super().__init__(str(self))

    def __str__(self):
        where = "" if self.step is None else f" at step {self.step}"
        return (
            f"stage iteration did not converge{where}: "
            f"{self.iterations} iterations, last increment {self.last_increment:.3e}"
        )

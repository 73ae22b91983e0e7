"""Exception hierarchy shared by the solvers, the simulation harness and the CLI."""


class LassoError(Exception):
    """Base class for every error raised by this package."""

    #: process exit code used by the command-line front end
    exit_code = 3


class InputError(LassoError, ValueError):
    exit_code = 2


class NumericalError(LassoError, ArithmeticError):
    exit_code = 3


class ConstantColumn(InputError):
    pass


class RankDeficient(NumericalError):
    pass


class MaxStepsExceeded(NumericalError):
    """Raised when LARS-LASSO exceeds its step cap (sign cycling)."""


class MaxIterationsExceeded(NumericalError):
    pass


class AtTransitionPoint(NumericalError):
    """The requested lambda coincides with a knot of the path."""


class EmptyActiveSet(NumericalError):
    pass


class EmptyCandidateSet(InputError):
    pass


class IndivisibleGrid(InputError):
    pass


class LengthMismatch(InputError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class ParseError(InputError):
    pass


class ConfigError(InputError):
    pass


class TrialFailureBudgetExceeded(LassoError):
    exit_code = 4

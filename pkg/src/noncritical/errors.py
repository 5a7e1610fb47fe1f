"""Exception hierarchy shared by all modules.

Each exception carries an ``exit_code`` used by the command-line front end:
0 pass, 2 precondition, 3 approximation degree, 4 solver, 5 quadrature.
"""


class ConstructionError(Exception):
    exit_code = 2


class PreconditionError(ConstructionError):
    exit_code = 2


class InvalidLatticeError(PreconditionError):
    pass


class PrecisionError(PreconditionError):
    pass


class PoleProximityError(PreconditionError):
    pass


class RangeError(ConstructionError):
    """An ``exp`` node overflowed double precision."""

    exit_code = 2

    def __init__(self, message, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class InvalidDivisorError(PreconditionError):
    pass


class UndefinedDegreeError(PreconditionError):
    pass


class QuadratureError(ConstructionError):
    exit_code = 5

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class WindingError(QuadratureError):
    pass


class ContourError(QuadratureError):
    pass


class ApproximationDegreeError(ConstructionError):
    """The boundary fit missed its residual target at the pole-order cap."""

    exit_code = 3


class BasisDegreeError(ApproximationDegreeError):
    pass


class SolveError(ConstructionError):
    exit_code = 4

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)

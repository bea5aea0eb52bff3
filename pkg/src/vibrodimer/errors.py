"""Exception hierarchy shared by all modules."""


class VibrodimerError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(VibrodimerError, ValueError):
    pass


class NoConvergence(VibrodimerError, ArithmeticError):
    pass


class NotDensityMatrix(VibrodimerError, ValueError):
    pass


class UnknownLabel(VibrodimerError, KeyError):
    pass


class DimMismatch(VibrodimerError, ValueError):
    pass


class DegenerateDimer(VibrodimerError, ValueError):
    pass


class ReductionMismatch(VibrodimerError, ArithmeticError):
    def __init__(self, deviation, tolerance):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"reduced spectrum deviates by {deviation:.3e} (tolerance {tolerance:.3e})"
        )


class StepTooLarge(VibrodimerError, ArithmeticError):
    pass


class VacuumExpectation(VibrodimerError, ZeroDivisionError):
    pass


class NotConverged(VibrodimerError, ArithmeticError):
    """Observable changed by more than the tolerance when the truncation was raised."""

    def __init__(self, observable, deviation, tolerance, report=None):
        self.observable = observable
        self.deviation = deviation
        self.tolerance = tolerance
        self.report = report
        super().__init__(
            f"{observable!r} not converged: deviation {deviation:.3e} >= {tolerance:.1e}"
        )


class ParseError(VibrodimerError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(VibrodimerError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")

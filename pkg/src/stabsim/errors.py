"""Exception hierarchy shared by all stabsim modules."""


class StabsimError(Exception):
    """Base class for every error raised by this package."""


class UnknownDatasetError(StabsimError, LookupError):
    pass


class DatasetParseError(StabsimError, ValueError):
    """A dataset document is malformed.

    ``line`` is the 1-based line of the offending token when known,
    ``field`` the dotted name of the offending field when known.
    """

    def __init__(self, message, *, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


class DatasetValidationError(StabsimError, ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateCouplingError(StabsimError, ValueError):
    """The continuum coupling (imaginary part of the off-diagonal polarizability) vanishes."""


class UnsupportedDatasetError(StabsimError, ValueError):
    pass


class DegenerateDatasetError(StabsimError, ValueError):
    pass


class BracketingError(StabsimError, ValueError):
    pass


class PartialFitError(StabsimError, RuntimeError):
    def __init__(self, message, failed_x=()):
        super().__init__(message)
        self.failed_x = tuple(failed_x)


class StiffnessError(StabsimError, RuntimeError):
    """Adaptive step size underflowed; ``s`` is where the integrator gave up."""

    def __init__(self, message, s):
        super().__init__(message)
        self.s = s

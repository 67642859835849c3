"""Exception hierarchy shared by all dldl modules."""


class DLDLError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(DLDLError, ValueError):
    pass


class SingularSystemError(DLDLError, ArithmeticError):
    pass


class DegenerateColumnError(DLDLError, ArithmeticError):
    """Raised when a column is too small to be normalized."""


class DegenerateHypergraphError(DLDLError, ValueError):
    """A vertex or hyperedge has zero degree."""


class ConsistencyError(DLDLError, RuntimeError):
    """The solver observed an objective increase. Always a bug."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class FormatError(DLDLError, ValueError):
    """Malformed input or model file."""

    def __init__(self, message, line=None, section=None):
        self.line = line
        self.section = section
        where = []
        if section is not None:
            where.append(f"section {section}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class UnsupportedVersionError(FormatError):
    pass

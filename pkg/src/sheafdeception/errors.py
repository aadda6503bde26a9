"""Exception types raised across the package."""


class SheafDeceptionError(Exception):
    """Base class for all package errors."""


class ParseError(SheafDeceptionError, ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class SingularOpinionError(SheafDeceptionError, ValueError):
    """A private opinion is too close to zero to divide by."""


class DegenerateEnergyError(SheafDeceptionError, ValueError):
    """Laplacian energy is zero, so the normalised centrality is undefined."""


class InsufficientVerticesError(SheafDeceptionError, ValueError):
    pass


class NumericError(SheafDeceptionError, ArithmeticError):
    """An iterative numerical routine failed to converge."""

"""Exception hierarchy shared by every qpekit module."""


class QPEError(Exception):
    """Base class for all qpekit errors."""


class InputError(QPEError):
    """Bad user input. The CLI maps these to exit code 2."""


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class EmptyHamiltonianError(InputError):
    pass


class ValidationError(InputError):
    pass


class DomainError(InputError):
    pass


class CapacityError(InputError):
    pass


class MeasureZeroError(QPEError):
    pass

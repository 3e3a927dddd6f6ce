"""Exception types raised by the package."""


class NsfdError(Exception):
    """Base class for all package errors."""


class ParameterError(NsfdError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class NonPositiveParameter(ParameterError):
    pass


class NonIntegerDelayRatio(ParameterError):
    pass


class MissingParameter(ParameterError):
    pass


class DomainError(NsfdError, ValueError):
    pass


class NotApplicable(NsfdError):
    """The requested quantity is undefined for these parameters."""


class WindowTooLarge(NsfdError, ValueError):
    pass


class MonitorsAbsent(NsfdError):
    pass


class EmptySweep(NsfdError, ValueError):
    pass


class ParseError(NsfdError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class ValidationError(NsfdError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class SinkError(NsfdError):
    pass

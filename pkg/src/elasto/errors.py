"""Exception hierarchy shared by every elasto module."""


class ElastoError(Exception):
    """Base class for all library errors."""


class NonPositiveDensity(ElastoError, ValueError):
    pass


class NonHyperbolic(ElastoError, ValueError):
    pass


class EmptySuperposition(ElastoError, ValueError):
    pass


class NoConvergence(ElastoError, ArithmeticError):
    """Quadrature hit its panel cap with the error estimate above 10 x rel_tol.

    The best available estimate is kept on the exception so callers can
    still use it.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class CFLViolation(ElastoError, ValueError):
    pass


class SupportViolation(ElastoError, ValueError):
    pass


class PreconditionError(ElastoError, ValueError):
    pass


class ConfigError(ElastoError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownProfile(ConfigError):
    def __init__(self, name, suggestion=None, line=None):
        msg = f"unknown profile {name!r}"
        if suggestion:
            msg += f" (did you mean {suggestion!r}?)"
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.name = name
        self.suggestion = suggestion
        self.line = line


class RangeError(ConfigError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key

"""Exception hierarchy. The CLI maps each class to its own exit code."""


class SdaeError(Exception):
    """Base class for all package errors."""


class ShapeError(SdaeError, ValueError):
    """Operand dimensions do not agree."""


class ParameterError(SdaeError, ValueError):
    """An argument is outside its documented domain."""


class ConfigError(SdaeError, ValueError):
    """A configuration is internally inconsistent (broken layer chain, bad k, ...)."""


class DataFormatError(SdaeError, ValueError):
    """A data or model file could not be parsed."""


class NumericError(SdaeError, ArithmeticError):
    """Training produced non-finite values."""

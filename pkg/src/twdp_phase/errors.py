"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """An input lies outside the domain where a quantity is defined."""


class ConfigError(ValueError):
    """A simulation or CLI configuration is inconsistent."""


class NumericError(ArithmeticError):
    """A series or quadrature failed to reach its tolerance.

    ``partial`` carries the best estimate available when the budget ran out,
    ``where`` names the computation that failed.
    """

    def __init__(self, message, partial=None, where=None):
        super().__init__(message)
        self.partial = partial
        self.where = where

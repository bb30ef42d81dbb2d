class DomainError(ValueError):
    """Arguments outside the domain where an operation is defined or validated."""


class PoleError(DomainError):
    def __init__(self, message, pole):
        super().__init__(message)
        self.pole = pole


class RegimeError(DomainError):
    """The requested evaluation regime cannot serve these arguments."""


class ConvergenceError(ArithmeticError):
    pass

"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class IfaceError(Exception):
    exit_code = 1


class InputError(IfaceError, ValueError):
    """Malformed or inconsistent user input (shapes, ids, ranges)."""

    exit_code = 1


class InstanceError(InputError):
    """Instance validation failed; ``diagnostics`` lists every violation."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class DataError(IfaceError):
    """Case or instance data could not be read or is semantically broken."""

    exit_code = 2


class NumericalError(IfaceError, ArithmeticError):
    exit_code = 3


class InfeasibleError(NumericalError):
    def __init__(self, message, achievable):
        self.achievable = achievable
        super().__init__(message)

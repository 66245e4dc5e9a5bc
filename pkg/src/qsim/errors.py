"""Exception hierarchy shared by every qsim module."""


class QsimError(Exception):
    """Base class for all errors raised by qsim."""


class DimensionError(QsimError, ValueError):
    """Operands act on different numbers of qubits."""


class ResourceError(QsimError):
    """A dense representation would exceed the configured qubit cap."""


class ContractError(QsimError, ValueError):
    """Arguments violate an operation's precondition (ordering, range, ...)."""


class NonHermitianError(QsimError, ValueError):
    """An operator expected to be Hermitian is not."""


class ParseError(QsimError, ValueError):
    """Malformed integrals file. ``line`` is 1-based, or None when unknown."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

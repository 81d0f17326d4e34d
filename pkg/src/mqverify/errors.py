"""Exception hierarchy shared by every module.

Each error carries a stable ``name`` used verbatim in CLI reports.
"""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class. ``exit_code`` is what the CLI returns when this escapes."""

    exit_code = 1

    @property
    def name(self) -> str:
        return type(self).__name__


# quiver-core
class NLevelTooSmall(WorkbenchError):
    pass


class BadPairing(WorkbenchError):
    pass


class InvalidQuiver(WorkbenchError):
    exit_code = 2


# scalar-linalg
class FieldMismatch(WorkbenchError):
    pass


class BadPrime(WorkbenchError):
    pass


class ShapeMismatch(WorkbenchError):
    pass


class SingularMatrix(WorkbenchError):
    pass


# ncpath
class NonComposable(WorkbenchError):
    pass


class ZeroParameter(WorkbenchError):
    pass


class ParseError(WorkbenchError):
    exit_code = 2

    def __init__(self, message: str, position: int | None = None, line: int | None = None):
        self.position = position
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        suffix = f" at {', '.join(where)}" if where else ""
        super().__init__(f"{message}{suffix}")


# rep-spaces
class DegreeOverflow(WorkbenchError):
    pass


class VertexMismatch(WorkbenchError):
    pass


class ObstructionError(WorkbenchError):
    """q^alpha != 1: no representation of the multiplicative preprojective
    algebra with this dimension vector exists."""

    def __init__(self, message: str, q_power=None):
        self.q_power = q_power
        super().__init__(message)


class SingularG(WorkbenchError):
    pass


class UnsupportedShape(WorkbenchError):
    pass


class RetryExhausted(WorkbenchError):
    exit_code = 3


class ConsistencyError(WorkbenchError):
    pass


class SingularGroupElem(WorkbenchError):
    pass


# stability
class IndexMismatch(WorkbenchError):
    pass


class TooLarge(WorkbenchError):
    exit_code = 3


# ext-complex
class NotAComplex(WorkbenchError):
    pass


class SingularD(WorkbenchError):
    pass


class SingularOperator(WorkbenchError):
    pass

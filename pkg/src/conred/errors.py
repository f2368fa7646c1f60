"""Exception hierarchy shared by every module."""


class ConredError(Exception):
    """Base class; the CLI maps these to exit code 1 or 2."""


class MalformedInput(ConredError):
    """Input that cannot be interpreted at all (CLI exit code 2)."""


class DimensionMismatch(MalformedInput):
    pass


class NotContained(ConredError):
    pass


class ArityMismatch(MalformedInput):
    pass


class PartialMap(MalformedInput):
    pass


class DegreeTooLarge(MalformedInput):
    pass


class VarMismatch(MalformedInput):
    pass


class ShapeMismatch(MalformedInput):
    pass


class SpaceMismatch(MalformedInput):
    pass


class BaseMismatch(MalformedInput):
    pass


class DegreeMismatch(MalformedInput):
    pass


class DegreeZero(MalformedInput):
    pass


class ParseError(MalformedInput):
    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


class NonCommutativeBase(ConredError):
    pass


class NotConstraintMap(ConredError):
    pass


class IllDefinedQuotient(ConredError):
    pass


class InvariantViolation(ConredError):
    """Structure constants or flags break a defining axiom."""


class NoDualBasis(ConredError):
    pass


class NotInWobs(ConredError):
    pass


class ClassicalAxiomsFail(ConredError):
    pass


class NotBundleMorphism(ConredError):
    pass


class ConstituentFails(ConredError):
    pass


class ChecksFail(ConredError):
    pass


class CheckFails(ConredError):
    pass

"""Exception hierarchy shared by every module."""


class CalculusError(Exception):
    """Base class; anything raised on purpose by the package derives from it."""


class ParseError(CalculusError):
    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


class IndexOutOfRange(CalculusError):
    pass


class SizeMismatch(CalculusError):
    pass


class TypeMismatch(CalculusError):
    def __init__(self, message, expected=None, found=None):
        self.expected = expected
        self.found = found
        if expected is not None or found is not None:
            message = f"{message}: expected {expected}, found {found}"
        super().__init__(message)


class VariableMismatch(CalculusError):
    pass


class OccurrenceCountMismatch(CalculusError):
    pass


class TypeClash(CalculusError):
    pass


class AnnotationMismatch(CalculusError):
    pass


class UnboundVariable(CalculusError):
    pass


class NotEtaLong(CalculusError):
    pass


class ContextMismatch(CalculusError):
    pass


class ArityMismatch(CalculusError):
    pass


class NotARedex(CalculusError):
    pass


class InvalidPosition(CalculusError):
    pass


class StepBudgetExceeded(CalculusError):
    pass


class ReductionCycle(StepBudgetExceeded):
    """A deterministic strategy came back to a derivation it had already visited."""

    def __init__(self, message, trace=None, start=None):
        self.trace = trace or []
        self.start = start
        super().__init__(message)


class JoinFailed(CalculusError):
    pass


class RuleViolation(CalculusError):
    pass


class SimulationMismatch(CalculusError):
    pass


class BoundExceeded(CalculusError):
    pass

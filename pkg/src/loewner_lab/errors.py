"""Exception hierarchy. Every library error derives from LoewnerLabError."""


class LoewnerLabError(ValueError):
    pass


class NotHermitian(LoewnerLabError):
    pass


class NoConvergence(LoewnerLabError, ArithmeticError):
    pass


class DomainError(LoewnerLabError):
    pass


class AlgebraMismatch(LoewnerLabError):
    pass


class NotPositive(LoewnerLabError):
    pass


class ParamOutOfRange(LoewnerLabError):
    pass


class RangeError(LoewnerLabError):
    pass


class BadSpec(LoewnerLabError):
    pass


class SingularIntermediate(LoewnerLabError, ArithmeticError):
    pass


class NotCommutative(LoewnerLabError):
    pass


class NotUnital(LoewnerLabError):
    pass


class NotJordan(LoewnerLabError):
    pass


class ParamInvariantViolated(LoewnerLabError):
    pass


class NotInvertible(LoewnerLabError):
    pass


class MidpointNotInvertible(LoewnerLabError):
    pass


class NotAffine(LoewnerLabError):
    pass


class NotCentralImage(LoewnerLabError):
    pass


class NotProjection(LoewnerLabError):
    pass


class HypothesisViolated(LoewnerLabError):
    pass


class InvariantViolated(LoewnerLabError):
    pass


class ProjectionNotFixed(LoewnerLabError):
    pass


class TypeI1Summand(LoewnerLabError):
    """Raised when a decomposition meets a 1x1 (commutative) block."""

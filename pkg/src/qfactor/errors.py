"""Exception hierarchy shared by all modules."""


class QFactorError(Exception):
    """Base class for every error raised by this package."""


class FieldMismatch(QFactorError):
    """Operands belong to different coefficient fields."""


class DivisionByZero(QFactorError):
    pass


class BadPrime(QFactorError):
    """The chosen prime is incompatible with the data (divides a denominator,
    or the field discriminant is a non-residue)."""


class NonSplitPrime(QFactorError):
    """A solve step needs all solutions rational mod p but some are not;
    the caller should retry with another prime."""


class DegenerateProjection(QFactorError):
    """The three linear forms defining a projection are dependent."""


class ZeroInput(QFactorError):
    pass


class CenterHitsPoint(QFactorError):
    """A point to be projected lies on the projection center."""


class NotInjectiveOnSet(QFactorError):
    """Two points of the set collide under the projection."""


class PositiveDimensionalIntersection(QFactorError):
    """Two plane curves share a common component."""


class SchemeNotReduced(QFactorError):
    """An intersection point occurs with multiplicity > 1."""


class TooLarge(QFactorError):
    """An enumeration would exceed the configured budget."""


class BudgetExhausted(QFactorError):
    pass


class ClusterAmbiguous(QFactorError):
    """Two solution clusters are too close to separate reliably."""


class PointNotOnVariety(QFactorError):
    pass


class PointNotOnDivisor(QFactorError):
    pass


class PositiveDimensionalBaseLocus(QFactorError):
    pass


class NodesMissing(QFactorError):
    pass


class UnverifiedNodes(QFactorError):
    pass


class DegenerateDraw(QFactorError):
    """A seeded random draw hit a degenerate configuration; redraw."""


class UnverifiableDegree(QFactorError):
    """An exact curve search at a binding degree is infeasible within budget."""


class HypothesisViolated(QFactorError):
    """A theorem hypothesis fails; no verdict can be issued on this route."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        self.detail = detail
        super().__init__(f"{condition}: {detail}" if detail else condition)


class GateFailed(QFactorError):
    """A named inequality gate of the constructive pipeline failed."""

    def __init__(self, gate: str, detail: str = ""):
        self.gate = gate
        self.detail = detail
        super().__init__(f"{gate}: {detail}" if detail else gate)


class SeparationFailed(QFactorError):
    """No separating form exists where the construction required one."""


class InternalContradiction(QFactorError):
    """Hypotheses hold but the guaranteed object was not found; this indicates
    a bug, not a property of the input."""

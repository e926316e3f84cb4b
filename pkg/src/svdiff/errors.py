"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all svdiff errors."""


class DimensionMismatch(ToolkitError):
    pass


class EmptyRegion(ToolkitError):
    pass


class UnsupportedDimension(ToolkitError):
    pass


class UnboundedWithoutTruncation(ToolkitError):
    pass


class NotReachable(ToolkitError):
    pass


class GaugeUnbounded(ToolkitError):
    pass


class ComplexityBudgetExceeded(ToolkitError):
    pass


class OutsideDomain(ToolkitError):
    pass


class OracleNotInvertible(ToolkitError):
    pass


class NotOnGraph(ToolkitError):
    pass


class NotInSet(ToolkitError):
    pass


class NotScalar(ToolkitError):
    pass


class InsufficientSamples(ToolkitError):
    pass


class EvaluationFailure(ToolkitError):
    pass


class HypothesisFailure(ToolkitError):
    pass


class CoverageGap(ToolkitError):
    pass


class PartitionGap(ToolkitError):
    pass


class CriterionFails(ToolkitError):
    pass

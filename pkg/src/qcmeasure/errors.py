"""Exception hierarchy shared by all analysis modules."""


class AnalysisError(Exception):
    """Base class for every error raised by :mod:`qcmeasure`."""


class DocumentSyntaxError(AnalysisError):
    """The family document is not well-formed (bad JSON, wrong JSON types)."""


class ValidationError(AnalysisError):
    """The document parsed but describes an invalid system."""


class NumericalFailure(AnalysisError):
    """A numerical kernel could not certify its result."""


class BudgetExceeded(AnalysisError):
    """An enumeration would exceed its configured point/product cap."""


class DimensionCap(AnalysisError):
    """The requested computation is refused above a hard dimension limit."""


class NotApplicable(AnalysisError):
    """A result's hypotheses are not certified for this family."""


class DegenerateMeasure(AnalysisError):
    """The certified quasi-controllability lower bound is zero."""


class NormUnsupported(AnalysisError):
    """The operation is only defined for a different norm."""

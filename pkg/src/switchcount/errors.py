"""Exception hierarchy shared across the package."""


class SwitchcountError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(SwitchcountError):
    """Malformed tabular input: ragged covariates, bad columns, dimension mismatch."""


class BalancedPanelError(SchemaError):
    """A (segment, period) cell is missing or duplicated."""


class CountDomainError(SchemaError):
    """A count value is negative or non-integer."""


class ParamDomainError(SwitchcountError):
    """A parameter value lies outside its valid domain."""


class SpecError(SwitchcountError):
    """An operation was invoked on a model spec it does not support."""


class InitError(SwitchcountError):
    """The likelihood is not finite at the requested starting point."""


class DataError(SwitchcountError):
    """Draw sequences contain non-finite or otherwise unusable values."""


class DiagnosticsUnavailable(SwitchcountError):
    """Standard errors are missing, so the requested diagnostic is undefined."""


class DegenerateCellsError(SwitchcountError):
    """Goodness-of-fit pooling would leave fewer than two count cells."""


class DegenerateVarianceError(SwitchcountError):
    """All MCMC draws are identical; scale reduction factors are undefined."""

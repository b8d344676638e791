"""Exception hierarchy shared by all bkevd modules.

Two broad failure classes matter to callers (and to the CLI exit codes):
configuration problems the user can fix by changing inputs, and numerical
failures arising from the data itself (lost positivity, rank collapse,
integrator blow-up).
"""


class BkevdError(Exception):
    """Base class for all bkevd-specific errors."""


class ConfigurationError(BkevdError):
    """Invalid configuration or incompatible inputs (CLI exit code 2)."""


class NumericalError(BkevdError):
    """Numerical failure during a computation (CLI exit code 3)."""


class IterationLimitError(NumericalError):
    """An iterative solver failed to converge within its iteration cap."""


class NormalizationError(NumericalError):
    """A kernel row sum or diagonal normalizer lost strict positivity."""


class RankError(NumericalError):
    """A matrix is numerically rank deficient where full rank is required."""


class DegenerateDataError(NumericalError):
    """Input data carries no usable variation (e.g. all-identical samples)."""


class InstabilityError(NumericalError):
    """Time integration blew up."""

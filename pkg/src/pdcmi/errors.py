"""Exception types shared across the package.

Every error raised by the library derives from PdcmiError so callers can
catch analysis failures without also catching programming errors. The CLI
maps IoError/FormatError/ParseError to exit code 2 and every other
PdcmiError to exit code 1.
"""


class PdcmiError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(PdcmiError):
    """An argument violated a documented precondition."""


class IoError(PdcmiError):
    """A file could not be read or written."""


class FormatError(PdcmiError):
    """A file's structure does not match its declared format."""


class ParseError(PdcmiError):
    """A cell or field could not be parsed; message carries the location."""


class EpochingError(PdcmiError):
    """A trial cannot be segmented into epochs."""


class LengthError(PdcmiError):
    """A signal is too short for the requested operation."""


class DesignError(PdcmiError):
    """Filter design parameters are outside the valid range."""


class SingularityError(PdcmiError):
    """A least-squares system is rank deficient."""


class DegenerateSignalError(PdcmiError):
    """A signal has no variance where variance is required."""


class RangeError(PdcmiError):
    """A frequency or band falls outside the valid range."""


class NumericalError(PdcmiError):
    """A computation lost the precision needed to continue."""


class StabilityError(PdcmiError):
    """An autoregressive model is not stationary."""


class FeatureSelectionWarning(UserWarning):
    """Feature selection ran on a map with no usable contrast."""

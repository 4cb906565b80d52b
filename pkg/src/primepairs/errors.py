"""Exception types shared by every module."""


class UsageError(ValueError):
    """Invalid arguments: bad flag, malformed input, unsupported option."""


class RangeError(UsageError):
    """A request reaches beyond the data a table or window covers."""


class ParityWarning(UserWarning):
    """Attached to results for a linear form with ``m + k`` even."""

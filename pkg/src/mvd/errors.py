"""Exception hierarchy shared by every module of the package."""


class MvdError(Exception):
    """Base class for all errors raised by mvd."""


class ZeroTotalWeight(MvdError, ValueError):
    pass


class BadK(MvdError, ValueError):
    pass


class BadN(MvdError, ValueError):
    pass


class BadDomain(MvdError, ValueError):
    pass


class DimensionMismatch(MvdError, ValueError):
    pass


class MissingMetric(MvdError, ValueError):
    pass


class InvalidMetric(MvdError, ValueError):
    pass


class BadPositions(MvdError, ValueError):
    pass


class BadEpsilon(MvdError, ValueError):
    pass


class NotKEntry(MvdError, ValueError):
    pass


class EnumerationCap(MvdError, ValueError):
    """Raised when an explicit enumeration of all n! rankings would be too large."""


class CapExceeded(MvdError, ValueError):
    pass


class UnknownRule(MvdError, ValueError):
    pass


class BadParams(MvdError, ValueError):
    pass


class ParseError(MvdError, ValueError):
    pass

"""Exception types shared across the package."""


class LibraError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LibraError):
    """Base class for errors caused by malformed or inconsistent input data."""


class MalformedRow(InputError):
    """A delimited row has the wrong number of fields."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class BadTimestamp(InputError):
    """A timestamp field could not be parsed as an instant."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class MissingColumn(InputError):
    """The schema refers to a column that is absent from the input."""

    def __init__(self, message: str, row: int = 1):
        super().__init__(f"row {row}: {message}")
        self.row = row


class MalformedXml(InputError):
    """The XML input could not be parsed."""


class MissingAttribute(InputError):
    """An XES event lacks a required attribute (concept:name or time:timestamp)."""


class EpochAfterStart(LibraError):
    """The reference epoch lies after the first event of a trace."""


class DomainError(LibraError):
    """A numeric argument is outside the domain of a budget function."""


class NotAnonymizable(LibraError):
    """The log consists entirely of unique trace variants and cannot be released."""


class EmptyDistribution(LibraError):
    """A distribution passed to the transport distance has no support."""


class BothEmpty(LibraError):
    """Both graphs are edgeless, so no distance is defined."""

"""Exception hierarchy shared by all compression stages."""


class CompressionError(Exception):
    """Base class for every error raised by this package."""


class DataError(CompressionError):
    """Input data cannot be processed (bad shape, non-finite values, bad config)."""


class QuantOverflowError(DataError):
    """Integer range exceeded; the error bound is too small for the data scale."""


class CorruptArchiveError(CompressionError):
    """Archive bytes are malformed, truncated, or internally inconsistent."""

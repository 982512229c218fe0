"""Exception types shared across the package."""


class IterAuctionError(Exception):
    """Base class for all package errors."""


class InvalidInputError(IterAuctionError, ValueError):
    """Malformed or dimensionally inconsistent input."""


class DegenerateInstanceError(IterAuctionError, ValueError):
    """Instance with zero optimal welfare; efficiency loss undefined."""


class UnsupportedSizeError(IterAuctionError, ValueError):
    """Problem too large for any exact oracle."""


class ExhaustedBidderError(IterAuctionError, RuntimeError):
    """A bidder has reported every bundle; no new query exists."""

"""Exception hierarchy shared by the library and the CLI.

Every user-facing failure derives from ``InputError`` (CLI exit code 1).
``InvariantViolation`` means the library produced something it should never
produce (CLI exit code 2).
"""


class ConvexPriceError(Exception):
    """Root of all convexprice errors."""


class InputError(ConvexPriceError):
    """Invalid input supplied by the caller."""


class InvariantViolation(ConvexPriceError):
    """An internal invariant failed."""


class _ItemError(InputError):
    def __init__(self, item_id: str, message: str):
        super().__init__(message)
        self.item_id = item_id


class EmptyMarket(InputError):
    pass


class NonPositiveAttribute(_ItemError):
    def __init__(self, item_id: str, attribute: str, value: float):
        super().__init__(item_id, f"listing {item_id!r} has {attribute}={value}, expected > 0")
        self.attribute = attribute


class DuplicateId(_ItemError):
    def __init__(self, item_id: str):
        super().__init__(item_id, f"listing id {item_id!r} appears more than once")


class VerticalPair(InputError):
    pass


class MismatchedMarket(InputError):
    pass


class EmptyFrontier(InputError):
    pass


class PositiveSlope(InputError):
    pass


class InvalidCdf(InputError):
    pass


class OutOfDomain(InputError):
    pass


class EmptyHistory(InputError):
    pass


class AllRecordsInconsistent(InputError):
    pass


class AllZeroCounts(InputError):
    pass


class OutOfRangePrice(InputError):
    pass


class InputFormatError(InputError):
    pass

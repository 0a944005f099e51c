"""Error taxonomy for the platform.

Every error carries a machine-readable ``code`` (its class name) that the
HTTP layer surfaces as the failure reason and the text channel maps to a
short ``ERR`` token.
"""

from __future__ import annotations


class QuotaflowError(Exception):
    """Base class; ``code`` is the stable machine-readable reason."""

    def __init__(self, detail: str = ""):
        super().__init__(detail or self.__class__.__name__)
        self.detail = detail

    @property
    def code(self) -> str:
        return self.__class__.__name__


class Unauthorized(QuotaflowError):
    pass


class UnknownEntity(QuotaflowError):
    """Lookup by id failed (404-equivalent)."""


class UnknownOrganization(UnknownEntity):
    pass


class UnknownBeneficiary(UnknownEntity):
    pass


class UnknownMerchant(UnknownEntity):
    pass


class UnknownQuota(UnknownEntity):
    pass


class UnknownSchedule(UnknownEntity):
    pass


class UnknownVoucher(UnknownEntity):
    pass


class UnknownItem(UnknownEntity):
    pass


class ValidationFailure(QuotaflowError):
    """Rule violation on otherwise well-addressed input (422-equivalent)."""


class ValidationError(ValidationFailure):
    pass


class MalformedNationalId(ValidationFailure):
    pass


class DuplicateNationalId(ValidationFailure):
    pass


class DuplicateMobile(ValidationFailure):
    pass


class InvalidDateRange(ValidationFailure):
    pass


class ItemLockedForPeriod(ValidationFailure):
    pass


class NoOpenEntitlement(ValidationFailure):
    pass


class DuplicateVoucher(ValidationFailure):
    pass


class CategoryMismatch(ValidationFailure):
    pass


class VoucherClosed(ValidationFailure):
    pass


class QuantityOutOfRange(ValidationFailure):
    pass


class InvalidPin(ValidationFailure):
    pass


class NotAppCapable(ValidationFailure):
    pass


class UnsupportedCombination(ValidationFailure):
    pass


class NoActiveSession(ValidationFailure):
    pass


class SessionActive(ValidationFailure):
    pass


class PhaseViolation(ValidationFailure):
    pass


class ChannelMismatch(ValidationFailure):
    pass


class ClockRegression(ValidationFailure):
    pass


class ParseError(QuotaflowError):
    """Text grammar violation; ``position`` is the 1-based token index."""

    def __init__(self, position: int, detail: str = ""):
        super().__init__(detail or f"parse error at token {position}")
        self.position = position


class FrameError(QuotaflowError):
    pass


class StorageFailure(QuotaflowError):
    pass


class CorruptJournal(QuotaflowError):
    """Journal integrity violation; ``seq`` is the first bad sequence number."""

    def __init__(self, seq: int, detail: str = ""):
        super().__init__(detail or f"corrupt journal at seq {seq}")
        self.seq = seq

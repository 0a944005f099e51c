"""Multi-channel subsidy distribution: quotas, entitlements, vouchers, refunds."""

from .errors import QuotaflowError
from .money import Money, Quantity
from .platform import DEFAULT_EPOCH, Platform

__all__ = ["DEFAULT_EPOCH", "Money", "Platform", "Quantity", "QuotaflowError"]
__version__ = "1.0.0"

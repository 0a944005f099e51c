"""Minimal ISO-8601 duration arithmetic for the virtual clock.

Supports the forms the harness needs: P[nY][nM][nW][nD][T[nH][nM][nS]].
Calendar components (years/months) shift by calendar, clamping the day to
the target month's end; the rest is plain timedelta.
"""

from __future__ import annotations

import calendar
import re
from datetime import datetime, timedelta

_DURATION_RE = re.compile(
    r"^P(?:(\d+)Y)?(?:(\d+)M)?(?:(\d+)W)?(?:(\d+)D)?"
    r"(?:T(?:(\d+)H)?(?:(\d+)M)?(?:(\d+)S)?)?$"
)


def parse_duration(text: str) -> tuple[int, timedelta]:
    """(calendar months, exact remainder) for an ISO-8601 duration."""
    m = _DURATION_RE.match(text.strip().upper())
    if not m or len(text.strip()) <= 1:
        raise ValueError(f"malformed ISO-8601 duration: {text!r}")
    years, months, weeks, days, hours, minutes, seconds = (
        int(g) if g else 0 for g in m.groups()
    )
    return (
        years * 12 + months,
        timedelta(weeks=weeks, days=days, hours=hours, minutes=minutes, seconds=seconds),
    )


def add_duration(start: datetime, text: str) -> datetime:
    months, delta = parse_duration(text)
    year = start.year + (start.month - 1 + months) // 12
    month = (start.month - 1 + months) % 12 + 1
    day = min(start.day, calendar.monthrange(year, month)[1])
    return start.replace(year=year, month=month, day=day) + delta

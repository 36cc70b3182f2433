"""UTC timestamp handling: parse/format at seconds precision.

All timestamps in the engine are timezone-aware UTC datetimes truncated to
whole seconds, so that serialized forms are bit-exact in golden files. No
operation reads a wall clock; time is always injected by the caller.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from .errors import ValidationError

UTC = timezone.utc
DAY = timedelta(days=1)


def parse_ts(text: str) -> datetime:
    """Parse ``YYYY-MM-DD`` or ISO-8601 timestamps into aware UTC seconds.

    Date-only input means midnight UTC. Naive timestamps are taken as UTC.
    """
    raw = text.strip()
    if not raw:
        raise ValidationError("empty timestamp")
    candidate = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    try:
        dt = datetime.fromisoformat(candidate)
    except ValueError as exc:
        raise ValidationError(f"invalid timestamp {text!r}: {exc}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC).replace(microsecond=0)


def format_ts(dt: datetime) -> str:
    """Render as ``YYYY-MM-DDTHH:MM:SSZ``."""
    return dt.astimezone(UTC).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


def to_epoch(dt: datetime) -> int:
    return int(dt.astimezone(UTC).replace(microsecond=0).timestamp())


def ensure_utc(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC).replace(microsecond=0)

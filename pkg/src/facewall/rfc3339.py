"""Strict RFC 3339 timestamp parsing and UTC-normalized serialization.

Timestamps without an explicit UTC offset are rejected outright: guessing a
local zone silently shifts posts across calendar-bucket boundaries.
"""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone

_TIMESTAMP_RE = re.compile(
    r"""^(\d{4})-(\d{2})-(\d{2})
        [Tt\ ]
        (\d{2}):(\d{2}):(\d{2})
        (?:\.(\d+))?
        (?:([Zz])|([+-])(\d{2}):(\d{2}))$""",
    re.VERBOSE,
)


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp into a timezone-aware UTC datetime.

    Raises ValueError for anything else, including timestamps that omit the
    offset entirely.
    """
    if not isinstance(text, str):
        raise ValueError("timestamp must be a string")
    m = _TIMESTAMP_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not an RFC 3339 timestamp: {text!r}")
    year, month, day, hour, minute, second = (int(m.group(i)) for i in range(1, 7))
    frac = m.group(7)
    micro = int(frac[:6].ljust(6, "0")) if frac else 0
    if m.group(8):
        tz = timezone.utc
    else:
        sign = 1 if m.group(9) == "+" else -1
        offset = timedelta(hours=int(m.group(10)), minutes=int(m.group(11)))
        tz = timezone(sign * offset)
    stamp = datetime(year, month, day, hour, minute, second, micro, tzinfo=tz)
    return stamp.astimezone(timezone.utc)


def format_rfc3339(stamp: datetime) -> str:
    """Serialize an aware datetime as canonical RFC 3339 UTC text.

    Round-trips through parse_rfc3339 unchanged. Microseconds appear only
    when non-zero.
    """
    if stamp.tzinfo is None:
        raise ValueError("naive datetime cannot be serialized")
    return stamp.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")

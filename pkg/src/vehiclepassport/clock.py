"""Injectable time sources so TTL and freshness checks are testable."""

import datetime
import time


def iso_utc(seconds: int) -> str:
    """Render unix seconds as ISO-8601 UTC with a trailing Z, no fractions."""
    dt = datetime.datetime.fromtimestamp(seconds, tz=datetime.timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_iso_utc(text: str) -> int:
    """Inverse of iso_utc; also accepts an explicit +00:00 offset."""
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=datetime.timezone.utc)
    return int(dt.timestamp())


class Clock:
    """Wall-clock time."""

    def now_s(self) -> int:
        return int(time.time())

    def now_ms(self) -> int:
        return int(time.time() * 1000)


class ManualClock(Clock):
    """Test clock advanced explicitly."""

    def __init__(self, start_s: int = 1_755_907_200):
        self._now_ms = start_s * 1000

    def now_s(self) -> int:
        return self._now_ms // 1000

    def now_ms(self) -> int:
        return self._now_ms

    def advance(self, seconds: float) -> None:
        self._now_ms += int(seconds * 1000)

    def set_s(self, seconds: int) -> None:
        self._now_ms = seconds * 1000

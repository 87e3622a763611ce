"""SMS channel model: owner commands, a bounded inbox, and fixed reply templates."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .geo import GeoFix

__all__ = [
    "DEFAULT_INBOX_CAPACITY",
    "SmsMessage",
    "Command",
    "Inbox",
    "parse_command",
    "inbox_push",
    "inbox_drain",
    "format_fixed",
    "format_location_reply",
    "format_theft_alert",
    "format_intruder_alert",
    "KEYPAD_INTRUDER_ALERT",
]

DEFAULT_INBOX_CAPACITY = 10
KEYPAD_INTRUDER_ALERT = "INTRUDER attempt - keypad"


@dataclass(frozen=True)
class SmsMessage:
    sender: str
    body: str
    received_at: int = 0

    def __post_init__(self):
        if not self.sender:
            raise ValueError("SMS sender must be non-empty")


class Command(enum.Enum):
    IGNITE = "Ignite"
    LOCATE = "Locate"
    UNKNOWN = "Unknown"


def parse_command(msg: SmsMessage, owner_number: str, ignite_kw: str, locate_kw: str) -> Command:
    """Map an SMS to a command; anything not from the owner is ``UNKNOWN``."""
    if msg.sender != owner_number:
        return Command.UNKNOWN
    word = msg.body.strip().casefold()
    if word == ignite_kw.strip().casefold():
        return Command.IGNITE
    if word == locate_kw.strip().casefold():
        return Command.LOCATE
    return Command.UNKNOWN


@dataclass(frozen=True)
class Inbox:
    capacity: int = DEFAULT_INBOX_CAPACITY
    queue: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.capacity < 0:
            raise ValueError("inbox capacity must be non-negative")
        object.__setattr__(self, "queue", tuple(self.queue))
        if len(self.queue) > self.capacity:
            raise ValueError("inbox holds more messages than its capacity")

    def __len__(self):
        return len(self.queue)


def inbox_push(ib: Inbox, msg: SmsMessage) -> tuple[Inbox, bool]:
    if len(ib.queue) >= ib.capacity:
        return ib, False
    return Inbox(ib.capacity, ib.queue + (msg,)), True


def inbox_drain(ib: Inbox) -> tuple[Inbox, list[SmsMessage]]:
    return Inbox(ib.capacity), list(ib.queue)


def format_fixed(value: float, places: int) -> str:
    """Fixed-point text rounded half-up on the shortest decimal repr of ``value``."""
    q = Decimal(repr(float(value))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)
    if q.is_zero():
        q = abs(q)
    return f"{q:f}"


def format_location_reply(fix: GeoFix) -> str:
    lat, lon = format_fixed(fix.lat, 6), format_fixed(fix.lon, 6)
    return f"LOC lat={lat} lon={lon} https://maps.google.com/?q={lat},{lon}"


def format_theft_alert(fix: GeoFix, displacement_m: float) -> str:
    return (
        f"THEFT moved={format_fixed(displacement_m, 1)}m "
        f"lat={format_fixed(fix.lat, 6)} lon={format_fixed(fix.lon, 6)}"
    )


def format_intruder_alert(url: str) -> str:
    if not url:
        raise ValueError("intruder alert needs a photo URL")
    return f"INTRUDER attempt - photo: {url}"

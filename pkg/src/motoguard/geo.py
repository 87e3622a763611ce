"""NMEA 0183 GGA/RMC parsing and engine-off movement detection."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from functools import reduce
from typing import Optional

__all__ = [
    "EARTH_RADIUS_M",
    "GeoFix",
    "MovementMonitor",
    "NmeaError",
    "BadChecksum",
    "UnsupportedSentence",
    "MalformedCoordinate",
    "MinutesOutOfRange",
    "EmptyFixFields",
    "nmea_checksum",
    "ddmm_to_degrees",
    "degrees_to_ddmm",
    "parse_nmea",
    "format_gga",
    "haversine_m",
    "monitor_update",
]

EARTH_RADIUS_M = 6_371_000.0

_SENTENCE = re.compile(r"^\$([^$*]*)\*([0-9A-Fa-f]{2})\r?\n?$")
_COORD = re.compile(r"^(\d{3,})(\.\d*)?$")


class NmeaError(ValueError):
    pass


class BadChecksum(NmeaError):
    pass


class UnsupportedSentence(NmeaError):
    pass


class MalformedCoordinate(NmeaError):
    pass


class MinutesOutOfRange(MalformedCoordinate):
    pass


class EmptyFixFields(NmeaError):
    pass


@dataclass(frozen=True)
class GeoFix:
    lat: float
    lon: float
    quality: int = 1
    time_tag: str = ""

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} out of range")
        if self.quality < 0:
            raise ValueError("fix quality must be non-negative")

    @property
    def valid(self) -> bool:
        return self.quality > 0


def nmea_checksum(payload: str) -> str:
    """XOR of the payload's character codes as two uppercase hex digits."""
    return "%02X" % reduce(lambda acc, ch: acc ^ ord(ch), payload, 0)


def ddmm_to_degrees(field: str, hemi: str) -> float:
    """Convert ``ddmm.mmmm``/``dddmm.mmmm`` plus hemisphere letter to signed degrees."""
    m = _COORD.match(field or "")
    if m is None:
        raise MalformedCoordinate(f"bad coordinate field {field!r}")
    if hemi not in ("N", "S", "E", "W"):
        raise MalformedCoordinate(f"bad hemisphere {hemi!r}")
    whole = m.group(1)
    degrees = int(whole[:-2])
    minutes = float(whole[-2:] + (m.group(2) or ""))
    if minutes >= 60.0:
        raise MinutesOutOfRange(f"minutes {minutes} >= 60 in {field!r}")
    value = degrees + minutes / 60.0
    return -value if hemi in ("S", "W") else value


def degrees_to_ddmm(value: float, is_lat: bool, decimals: int = 6) -> tuple[str, str]:
    """Inverse of :func:`ddmm_to_degrees`; returns ``(field, hemisphere)``."""
    hemi = ("N" if value >= 0 else "S") if is_lat else ("E" if value >= 0 else "W")
    scale = 10**decimals
    # work in integer units of 10^-decimals minutes so rounding never yields 60'
    total = round(abs(value) * 60 * scale)
    deg, minute_units = divmod(total, 60 * scale)
    width = 2 if is_lat else 3
    minutes = "%0*d.%0*d" % (2, minute_units // scale, decimals, minute_units % scale)
    return "%0*d%s" % (width, deg, minutes), hemi


def _fix_from_fields(lat: str, ns: str, lon: str, ew: str, quality: int, time_tag: str) -> GeoFix:
    if not lat or not lon:
        raise EmptyFixFields("latitude/longitude fields are blank")
    try:
        return GeoFix(ddmm_to_degrees(lat, ns), ddmm_to_degrees(lon, ew), quality, time_tag)
    except NmeaError:
        raise
    except ValueError as exc:
        raise MalformedCoordinate(str(exc)) from exc


def parse_nmea(sentence: str) -> GeoFix:
    """Parse a checksummed GGA or RMC sentence into a fix."""
    m = _SENTENCE.match(sentence)
    if m is None:
        raise NmeaError(f"not an NMEA sentence: {sentence!r}")
    payload, given = m.group(1), m.group(2).upper()
    expected = nmea_checksum(payload)
    if given != expected:
        raise BadChecksum(f"checksum {given} does not match computed {expected}")

    fields = payload.split(",")
    kind = fields[0][-3:] if len(fields[0]) == 5 else ""
    if kind == "GGA":
        if len(fields) < 7:
            raise EmptyFixFields("GGA sentence too short")
        try:
            quality = int(fields[6]) if fields[6] else 0
        except ValueError:
            raise NmeaError(f"bad GGA fix quality {fields[6]!r}") from None
        return _fix_from_fields(fields[2], fields[3], fields[4], fields[5], quality, fields[1])
    if kind == "RMC":
        if len(fields) < 7:
            raise EmptyFixFields("RMC sentence too short")
        quality = 1 if fields[2] == "A" else 0
        return _fix_from_fields(fields[3], fields[4], fields[5], fields[6], quality, fields[1])
    raise UnsupportedSentence(f"unsupported sentence type {fields[0]!r}")


def format_gga(fix: GeoFix, talker: str = "GP") -> str:
    """Synthesize a checksummed GGA sentence carrying ``fix``."""
    lat, ns = degrees_to_ddmm(fix.lat, is_lat=True)
    lon, ew = degrees_to_ddmm(fix.lon, is_lat=False)
    payload = f"{talker}GGA,{fix.time_tag},{lat},{ns},{lon},{ew},{fix.quality},08,0.9,0.0,M,0.0,M,,"
    return f"${payload}*{nmea_checksum(payload)}"


def haversine_m(a: GeoFix, b: GeoFix) -> float:
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = phi2 - phi1
    dlmb = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(min(1.0, h)))


@dataclass(frozen=True)
class MovementMonitor:
    """Engine-off geofence anchored at the parking position.

    The anchor never follows the vehicle; repeated alerts report displacement
    from where it was left, spaced by at least ``cooldown_ms``.
    """

    anchor: Optional[GeoFix] = None
    threshold_m: float = 5.0
    cooldown_ms: int = 60_000
    last_alert_time: Optional[int] = None

    def __post_init__(self):
        if self.threshold_m <= 0:
            raise ValueError("threshold_m must be positive")
        if self.cooldown_ms < 0:
            raise ValueError("cooldown_ms must be non-negative")


def monitor_update(
    m: MovementMonitor, fix: GeoFix, now: int
) -> tuple[MovementMonitor, Optional[float]]:
    if not fix.valid:
        return m, None
    if m.anchor is None:
        return replace(m, anchor=fix), None
    moved = haversine_m(m.anchor, fix)
    if moved <= m.threshold_m:
        return m, None
    if m.last_alert_time is not None and now - m.last_alert_time < m.cooldown_ms:
        return m, None
    return replace(m, last_alert_time=now), moved

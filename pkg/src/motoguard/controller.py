"""Ignition controller state machine.

The controller is a pure transition function: ``step`` takes the current
state and one input event and returns the next state plus the side effects
the hardware layer should perform. Nothing here reads a clock or touches I/O;
the simulated time arrives as ``now`` and photo uploads go through an
injected ``uploader``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from .facerec import DEFAULT_THRESHOLD, FaceDb, Match, detect_face, identify
from .geo import GeoFix, MovementMonitor, NmeaError, monitor_update, parse_nmea
from .imaging import GrayImage, save_pgm
from .telecom import (
    KEYPAD_INTRUDER_ALERT,
    Command,
    Inbox,
    SmsMessage,
    format_intruder_alert,
    format_location_reply,
    format_theft_alert,
    inbox_drain,
    inbox_push,
    parse_command,
)
from .upload import upload_stub

__all__ = [
    "KEYPAD_BUFFER_MAX",
    "InvalidConfig",
    "ControllerConfig",
    "Mode",
    "ControllerState",
    "FaceCaptured",
    "KeypadDigit",
    "KeypadSubmit",
    "SmsArrived",
    "NmeaSentence",
    "EngineOff",
    "Tick",
    "Event",
    "IgniteEngine",
    "StopEngine",
    "SendSms",
    "CaptureAndUpload",
    "ReadyIndicator",
    "LogError",
    "Action",
    "init",
    "step",
]

KEYPAD_BUFFER_MAX = 16


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class ControllerConfig:
    owner_number: str
    passcode: str
    ignite_kw: str = "IGNITE"
    locate_kw: str = "LOCATE"
    face_threshold: float = DEFAULT_THRESHOLD
    move_threshold_m: float = 5.0
    alert_cooldown_ms: int = 60_000
    max_keypad_attempts: int = 3

    def validate(self) -> None:
        if not self.owner_number:
            raise InvalidConfig("owner_number must be non-empty")
        if not self.passcode or not (self.passcode.isascii() and self.passcode.isdigit()):
            raise InvalidConfig("passcode must be a non-empty string of digits")
        if len(self.passcode) > KEYPAD_BUFFER_MAX:
            raise InvalidConfig(f"passcode longer than {KEYPAD_BUFFER_MAX} digits")
        if not self.ignite_kw.strip() or not self.locate_kw.strip():
            raise InvalidConfig("keywords must be non-empty")
        if self.ignite_kw.strip().casefold() == self.locate_kw.strip().casefold():
            raise InvalidConfig("ignite and locate keywords must differ")
        if not self.face_threshold >= 0:
            raise InvalidConfig("face_threshold must be non-negative")
        if not self.move_threshold_m > 0:
            raise InvalidConfig("move_threshold_m must be positive")
        if self.alert_cooldown_ms < 0:
            raise InvalidConfig("alert_cooldown_ms must be non-negative")
        if self.max_keypad_attempts < 1:
            raise InvalidConfig("max_keypad_attempts must be at least 1")


class Mode(enum.Enum):
    ARMED = "Armed"
    RUNNING = "Running"


@dataclass(frozen=True)
class ControllerState:
    mode: Mode
    monitor: MovementMonitor
    inbox: Inbox = field(default_factory=Inbox)
    keypad_buffer: str = ""
    keypad_attempts: int = 0
    last_fix: Optional[GeoFix] = None


# -- events ------------------------------------------------------------------


@dataclass(frozen=True)
class FaceCaptured:
    image: GrayImage


@dataclass(frozen=True)
class KeypadDigit:
    digit: str


@dataclass(frozen=True)
class KeypadSubmit:
    pass


@dataclass(frozen=True)
class SmsArrived:
    message: SmsMessage


@dataclass(frozen=True)
class NmeaSentence:
    sentence: str


@dataclass(frozen=True)
class EngineOff:
    pass


@dataclass(frozen=True)
class Tick:
    pass


Event = Union[FaceCaptured, KeypadDigit, KeypadSubmit, SmsArrived, NmeaSentence, EngineOff, Tick]


# -- actions -----------------------------------------------------------------


@dataclass(frozen=True)
class IgniteEngine:
    pass


@dataclass(frozen=True)
class StopEngine:
    pass


@dataclass(frozen=True)
class SendSms:
    to: str
    body: str


@dataclass(frozen=True)
class CaptureAndUpload:
    image: GrayImage
    url: str


@dataclass(frozen=True)
class ReadyIndicator:
    pass


@dataclass(frozen=True)
class LogError:
    message: str


Action = Union[IgniteEngine, StopEngine, SendSms, CaptureAndUpload, ReadyIndicator, LogError]


def init(config: ControllerConfig) -> tuple[ControllerState, list[Action]]:
    config.validate()
    monitor = MovementMonitor(
        anchor=None,
        threshold_m=config.move_threshold_m,
        cooldown_ms=config.alert_cooldown_ms,
    )
    return ControllerState(mode=Mode.ARMED, monitor=monitor), [ReadyIndicator()]


def _ignite(state: ControllerState) -> ControllerState:
    return replace(
        state,
        mode=Mode.RUNNING,
        keypad_buffer="",
        keypad_attempts=0,
        monitor=replace(state.monitor, anchor=None, last_alert_time=None),
    )


def _on_face(state, event, config, facedb, uploader, detector):
    if state.mode is Mode.RUNNING:
        return state, []
    result = identify(facedb, event.image, config.face_threshold, detector)
    if isinstance(result, Match):
        return _ignite(state), [IgniteEngine()]
    url = uploader(save_pgm(event.image))
    return state, [
        CaptureAndUpload(event.image, url),
        SendSms(config.owner_number, format_intruder_alert(url)),
    ]


def _on_digit(state, event):
    if state.mode is Mode.RUNNING:
        return state, []
    if len(event.digit) != 1 or event.digit not in "0123456789":
        return state, [LogError(f"invalid keypad key {event.digit!r}")]
    if len(state.keypad_buffer) >= KEYPAD_BUFFER_MAX:
        return state, []
    return replace(state, keypad_buffer=state.keypad_buffer + event.digit), []


def _on_submit(state, config):
    if state.mode is Mode.RUNNING:
        return state, []
    if state.keypad_buffer == config.passcode:
        return _ignite(state), [IgniteEngine()]
    attempts = state.keypad_attempts + 1
    if attempts >= config.max_keypad_attempts:
        return (
            replace(state, keypad_buffer="", keypad_attempts=0),
            [SendSms(config.owner_number, KEYPAD_INTRUDER_ALERT)],
        )
    return replace(state, keypad_buffer="", keypad_attempts=attempts), []


def _on_sms(state, event, config):
    actions: list[Action] = []
    inbox, accepted = inbox_push(state.inbox, event.message)
    if not accepted:
        actions.append(LogError("inbox full, message dropped"))
    inbox, messages = inbox_drain(inbox)
    state = replace(state, inbox=inbox)
    for msg in messages:
        cmd = parse_command(msg, config.owner_number, config.ignite_kw, config.locate_kw)
        if cmd is Command.IGNITE and state.mode is Mode.ARMED:
            state = _ignite(state)
            actions.append(IgniteEngine())
        elif cmd is Command.LOCATE:
            if state.last_fix is None:
                actions.append(LogError("no fix"))
            else:
                actions.append(SendSms(config.owner_number, format_location_reply(state.last_fix)))
    return state, actions


def _on_nmea(state, event, config, now):
    try:
        fix = parse_nmea(event.sentence)
    except NmeaError as exc:
        return state, [LogError(f"nmea: {exc}")]
    state = replace(state, last_fix=fix)
    if state.mode is Mode.RUNNING:
        return state, []
    monitor, moved = monitor_update(state.monitor, fix, now)
    state = replace(state, monitor=monitor)
    if moved is None:
        return state, []
    return state, [SendSms(config.owner_number, format_theft_alert(fix, moved))]


def _on_engine_off(state):
    if state.mode is Mode.ARMED:
        return state, []
    anchor = state.last_fix if state.last_fix is not None and state.last_fix.valid else None
    monitor = replace(state.monitor, anchor=anchor, last_alert_time=None)
    return replace(state, mode=Mode.ARMED, monitor=monitor), [StopEngine()]


def step(
    state: ControllerState,
    event: Event,
    config: ControllerConfig,
    facedb: FaceDb,
    now: int,
    uploader: Callable[[bytes], str] = upload_stub,
    detector=detect_face,
) -> tuple[ControllerState, list[Action]]:
    """Advance the controller by one event at simulated time ``now`` (ms)."""
    if isinstance(event, FaceCaptured):
        return _on_face(state, event, config, facedb, uploader, detector)
    if isinstance(event, KeypadDigit):
        return _on_digit(state, event)
    if isinstance(event, KeypadSubmit):
        return _on_submit(state, config)
    if isinstance(event, SmsArrived):
        return _on_sms(state, event, config)
    if isinstance(event, NmeaSentence):
        return _on_nmea(state, event, config, now)
    if isinstance(event, EngineOff):
        return _on_engine_off(state)
    if isinstance(event, Tick):
        return state, []
    return state, [LogError(f"unhandled event {type(event).__name__}")]

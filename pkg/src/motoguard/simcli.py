"""Scenario replay harness and command-line entry point.

A scenario is a text file of timestamped hardware events::

    0     CAMERA faces/owner.pgm
    500   KEY 4
    600   KEY ENTER
    1000  SMS +639170000000 LOCATE
    2000  NMEA $GPGGA,...*47
    3000  ENGINE_OFF

Running it drives the controller and yields one trace line per input event
and per emitted action, formatted ``<t_ms> <TAG> <detail>``.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from . import controller as ctl
from .facerec import DEFAULT_THRESHOLD, FaceDb, Match, enroll, identify, lbp_map
from .imaging import GrayImage, load_pgm, load_ppm, rgb_to_gray, save_pgm
from .storage import load_config, load_facedb, save_facedb
from .telecom import SmsMessage
from .upload import fnv1a_64, upload_stub

__all__ = [
    "ScenarioEvent",
    "TraceLine",
    "MalformedLine",
    "fnv1a_64",
    "upload_stub",
    "parse_scenario",
    "run_scenario",
    "render_trace",
    "load_image",
    "cli_main",
    "main",
]

_KINDS = ("CAMERA", "KEY", "SMS", "NMEA", "ENGINE_OFF")


class MalformedLine(ValueError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


@dataclass(frozen=True)
class ScenarioEvent:
    t: int
    kind: str
    payload: str = ""
    line_no: int = 0

    def describe(self) -> str:
        return f"{self.kind} {self.payload}" if self.payload else self.kind


@dataclass(frozen=True)
class TraceLine:
    t: int
    tag: str
    detail: str = ""

    def render(self) -> str:
        return f"{self.t} {self.tag} {self.detail}" if self.detail else f"{self.t} {self.tag}"


def parse_scenario(text: str) -> list[ScenarioEvent]:
    """Parse scenario text; events come back stably sorted by timestamp."""
    events = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 2)
        if len(parts) < 2:
            raise MalformedLine(line_no, f"expected '<t_ms> <KIND> ...', got {raw!r}")
        t_text, kind = parts[0], parts[1]
        payload = parts[2] if len(parts) > 2 else ""
        if not t_text.isdigit():
            raise MalformedLine(line_no, f"timestamp {t_text!r} is not a non-negative integer")
        if kind not in _KINDS:
            raise MalformedLine(line_no, f"unknown event kind {kind!r}")

        if kind == "KEY":
            if not (payload == "ENTER" or (len(payload) == 1 and payload in "0123456789")):
                raise MalformedLine(line_no, f"KEY expects a digit or ENTER, got {payload!r}")
        elif kind == "SMS":
            if not payload:
                raise MalformedLine(line_no, "SMS needs a sender")
            sender_body = payload.split(None, 1)
            payload = sender_body[0] + (" " + sender_body[1] if len(sender_body) > 1 else "")
        elif kind in ("CAMERA", "NMEA"):
            if not payload or len(payload.split()) != 1:
                raise MalformedLine(line_no, f"{kind} expects exactly one argument")
        elif payload:
            raise MalformedLine(line_no, "ENGINE_OFF takes no arguments")
        events.append(ScenarioEvent(int(t_text), kind, payload, line_no))
    return sorted(events, key=lambda e: e.t)


def load_image(path: Union[str, Path]) -> GrayImage:
    """Read a PGM, or a PPM converted to grayscale."""
    data = Path(path).read_bytes()
    if data[:2] in (b"P3", b"P6"):
        return rgb_to_gray(load_ppm(data))
    return load_pgm(data)


def _to_controller_event(ev: ScenarioEvent, base_dir: Path):
    if ev.kind == "CAMERA":
        path = Path(ev.payload)
        if not path.is_absolute():
            path = base_dir / path
        return ctl.FaceCaptured(load_image(path))
    if ev.kind == "KEY":
        return ctl.KeypadSubmit() if ev.payload == "ENTER" else ctl.KeypadDigit(ev.payload)
    if ev.kind == "SMS":
        sender, _, body = ev.payload.partition(" ")
        return ctl.SmsArrived(SmsMessage(sender, body, ev.t))
    if ev.kind == "NMEA":
        return ctl.NmeaSentence(ev.payload)
    return ctl.EngineOff()


def _render_action(t: int, action) -> TraceLine:
    if isinstance(action, ctl.IgniteEngine):
        return TraceLine(t, "IGNITE", "engine started")
    if isinstance(action, ctl.StopEngine):
        return TraceLine(t, "STOP", "engine stopped")
    if isinstance(action, ctl.SendSms):
        return TraceLine(t, "SMS_OUT", f"{action.to} {action.body}")
    if isinstance(action, ctl.CaptureAndUpload):
        return TraceLine(t, "EVENT", f"UPLOAD {action.url}")
    if isinstance(action, ctl.ReadyIndicator):
        return TraceLine(t, "READY", "controller initialized")
    if isinstance(action, ctl.LogError):
        return TraceLine(t, "ERROR", action.message)
    raise TypeError(f"unknown action {action!r}")


def run_scenario(
    scenario: Union[str, Sequence[ScenarioEvent]],
    config: ctl.ControllerConfig,
    facedb: FaceDb,
    base_dir: Union[str, Path, None] = None,
) -> list[TraceLine]:
    """Replay a scenario against a fresh controller and return the trace.

    Image and event failures become ERROR lines; the run always completes.
    """
    events = parse_scenario(scenario) if isinstance(scenario, str) else list(scenario)
    base = Path(base_dir) if base_dir is not None else Path(".")

    state, actions = ctl.init(config)
    trace = [_render_action(0, a) for a in actions]
    for ev in events:
        trace.append(TraceLine(ev.t, "EVENT", ev.describe()))
        try:
            event = _to_controller_event(ev, base)
        except (OSError, ValueError) as exc:
            trace.append(TraceLine(ev.t, "ERROR", f"{ev.kind.lower()}: {exc}"))
            continue
        state, actions = ctl.step(state, event, config, facedb, ev.t, uploader=upload_stub)
        trace.extend(_render_action(ev.t, a) for a in actions)
    return trace


def render_trace(trace: Sequence[TraceLine]) -> str:
    return "".join(line.render() + "\n" for line in trace)


# -- command line --------------------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="motoguard", description="Vehicle ignition security simulator.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("enroll", help="add a face image to the database")
    p.add_argument("--db", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--image", required=True)

    p = sub.add_parser("identify", help="match a face image against the database")
    p.add_argument("--db", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)

    p = sub.add_parser("run", help="replay a scenario and print its trace")
    p.add_argument("--config", required=True)
    p.add_argument("--db", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--trace-out")

    p = sub.add_parser("lbp", help="write the LBP code map of an image as a PGM")
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    return parser


def _cmd_enroll(args) -> int:
    db_path = Path(args.db)
    db = load_facedb(db_path.read_bytes()) if db_path.exists() else FaceDb()
    db = enroll(db, args.label, load_image(args.image))
    db_path.write_bytes(save_facedb(db))
    return 0


def _cmd_identify(args) -> int:
    if args.threshold < 0:
        raise UsageError("--threshold must be non-negative")
    db = load_facedb(Path(args.db).read_bytes())
    result = identify(db, load_image(args.image), args.threshold)
    if isinstance(result, Match):
        print(f"MATCH {result.label} {result.distance:.6f}")
    elif result.best_distance is None:
        print("NOMATCH -")
    else:
        print(f"NOMATCH {result.best_distance:.6f}")
    return 0


def _cmd_run(args) -> int:
    config = load_config(Path(args.config).read_bytes())
    db = load_facedb(Path(args.db).read_bytes())
    scenario_path = Path(args.scenario)
    events = parse_scenario(scenario_path.read_text(encoding="utf-8"))
    text = render_trace(run_scenario(events, config, db, base_dir=scenario_path.parent))
    if args.trace_out:
        Path(args.trace_out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_lbp(args) -> int:
    codes = lbp_map(load_image(args.image))
    Path(args.out).write_bytes(save_pgm(codes.to_gray()))
    return 0


_COMMANDS = {"enroll": _cmd_enroll, "identify": _cmd_identify, "run": _cmd_run, "lbp": _cmd_lbp}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())

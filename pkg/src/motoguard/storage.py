"""Text formats for the face database and controller configuration."""

from __future__ import annotations

import dataclasses

import numpy as np

from .controller import ControllerConfig, InvalidConfig
from .facerec import BINS, GRID, DuplicateLabel, FaceDb, FaceTemplate

__all__ = [
    "FACEDB_HEADER",
    "StorageError",
    "BadHeader",
    "DimensionMismatch",
    "MalformedNumber",
    "ConfigError",
    "MissingRequiredKey",
    "UnknownKey",
    "MalformedValue",
    "DuplicateLabel",
    "save_facedb",
    "load_facedb",
    "load_config",
    "save_config",
]

FACEDB_HEADER = "FACEDB v1"
REQUIRED_KEYS = ("owner_number", "passcode")


class StorageError(ValueError):
    pass


class BadHeader(StorageError):
    pass


class DimensionMismatch(StorageError):
    pass


class MalformedNumber(StorageError):
    pass


class ConfigError(ValueError):
    pass


class MissingRequiredKey(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class MalformedValue(ConfigError):
    pass


def save_facedb(db: FaceDb) -> bytes:
    lines = [FACEDB_HEADER]
    for t in db.templates:
        lines.append(f"TEMPLATE {t.label} {GRID} {GRID} {BINS}")
        for row in t.grid.reshape(GRID * GRID, BINS):
            lines.append(" ".join(format(float(v), ".9g") for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _parse_template_line(line: str, line_no: int):
    rest = line[len("TEMPLATE ") :]
    parts = rest.rsplit(" ", 3)
    if len(parts) != 4 or not parts[0]:
        raise DimensionMismatch(f"line {line_no}: malformed TEMPLATE line {line!r}")
    label, *dims = parts
    try:
        rows, cols, bins = (int(d) for d in dims)
    except ValueError:
        raise MalformedNumber(f"line {line_no}: bad dimensions in {line!r}") from None
    if (rows, cols, bins) != (GRID, GRID, BINS):
        raise DimensionMismatch(
            f"line {line_no}: template {label!r} declares {rows}x{cols}x{bins}, "
            f"expected {GRID}x{GRID}x{BINS}"
        )
    return label


def load_facedb(buf: bytes) -> FaceDb:
    lines = bytes(buf).decode("utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != FACEDB_HEADER:
        raise BadHeader(f"expected {FACEDB_HEADER!r} header")

    templates = []
    seen = set()
    i = 1
    while i < len(lines):
        line = lines[i]
        if not line.startswith("TEMPLATE "):
            raise DimensionMismatch(f"line {i + 1}: expected TEMPLATE, got {line[:40]!r}")
        label = _parse_template_line(line, i + 1)
        if label in seen:
            raise DuplicateLabel(f"line {i + 1}: label {label!r} appears twice")
        seen.add(label)
        rows = lines[i + 1 : i + 1 + GRID * GRID]
        if len(rows) != GRID * GRID:
            raise DimensionMismatch(f"template {label!r} has {len(rows)} rows, expected {GRID * GRID}")
        grid = np.empty((GRID * GRID, BINS), dtype=np.float64)
        for r, row in enumerate(rows):
            fields = row.split()
            if len(fields) != BINS:
                raise DimensionMismatch(
                    f"line {i + 2 + r}: {len(fields)} bins, expected {BINS}"
                )
            try:
                grid[r] = [float(f) for f in fields]
            except ValueError:
                raise MalformedNumber(f"line {i + 2 + r}: non-numeric bin value") from None
        if not np.all(np.isfinite(grid)) or np.any(grid < 0):
            raise MalformedNumber(f"template {label!r} has negative or non-finite bins")
        templates.append(FaceTemplate(label, grid.reshape(GRID, GRID, BINS)))
        i += 1 + GRID * GRID
    return FaceDb(tuple(templates))


_CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(ControllerConfig)}
_CONVERTERS = {"face_threshold": float, "move_threshold_m": float,
               "alert_cooldown_ms": int, "max_keypad_attempts": int}


def load_config(buf: bytes) -> ControllerConfig:
    """Parse ``key=value`` lines; ``#`` comments and blank lines are skipped."""
    values = {}
    for line_no, raw in enumerate(bytes(buf).decode("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MalformedValue(f"line {line_no}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_FIELDS:
            raise UnknownKey(f"line {line_no}: unknown key {key!r}")
        convert = _CONVERTERS.get(key, str)
        try:
            values[key] = convert(value)
        except ValueError:
            raise MalformedValue(f"line {line_no}: bad value for {key}: {value!r}") from None

    for key in REQUIRED_KEYS:
        if key not in values:
            raise MissingRequiredKey(f"missing required key {key!r}")
    config = ControllerConfig(**values)
    try:
        config.validate()
    except InvalidConfig as exc:
        raise MalformedValue(str(exc)) from exc
    return config


def save_config(config: ControllerConfig) -> bytes:
    return "".join(
        f"{name}={getattr(config, name)}\n" for name in _CONFIG_FIELDS
    ).encode("utf-8")

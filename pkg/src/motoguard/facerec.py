"""LBP face recognition: region selection, LBP codes, grid histograms, chi-square matching.

The pipeline is grayscale frame -> face rectangle -> 128x128 crop -> LBP code map
-> 8x8 grid of 256-bin histograms. Two faces are compared by summing the
chi-square distance of corresponding cells; identification is nearest
neighbour over the enrolled templates with an acceptance threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .imaging import GrayImage, resize_nearest

__all__ = [
    "FACE_SIZE",
    "GRID",
    "BINS",
    "DEFAULT_THRESHOLD",
    "NEIGHBOR_OFFSETS",
    "Rect",
    "LbpImage",
    "FaceTemplate",
    "FaceDb",
    "Match",
    "NoMatch",
    "MatchResult",
    "FaceRecError",
    "EmptyLabel",
    "DuplicateLabel",
    "LengthMismatch",
    "detect_face",
    "lbp_map",
    "cell_histograms",
    "extract_template",
    "chi_square",
    "template_distance",
    "enroll",
    "identify",
]

FACE_SIZE = 128
GRID = 8
BINS = 256
CELL = FACE_SIZE // GRID
DEFAULT_THRESHOLD = 1.0

# (dy, dx, bit): clockwise from the top-left neighbour, which is the MSB.
NEIGHBOR_OFFSETS = (
    (-1, -1, 7),
    (-1, 0, 6),
    (-1, 1, 5),
    (0, 1, 4),
    (1, 1, 3),
    (1, 0, 2),
    (1, -1, 1),
    (0, -1, 0),
)


class FaceRecError(ValueError):
    pass


class EmptyLabel(FaceRecError):
    pass


class DuplicateLabel(FaceRecError):
    pass


class LengthMismatch(FaceRecError):
    pass


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"rect must be at least 1x1, got {self.w}x{self.h}")
        if self.x < 0 or self.y < 0:
            raise ValueError("rect origin must be non-negative")

    def fits(self, img: GrayImage) -> bool:
        return self.x + self.w <= img.width and self.y + self.h <= img.height


@dataclass(frozen=True)
class LbpImage:
    width: int
    height: int
    codes: bytes

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.codes, dtype=np.uint8).reshape(self.height, self.width)

    def to_gray(self) -> GrayImage:
        return GrayImage(self.width, self.height, self.codes)


FaceDetector = Callable[[GrayImage], Rect]


def detect_face(img: GrayImage) -> Rect:
    """Whole-frame detector; swap in any ``GrayImage -> Rect`` callable for a real one."""
    return Rect(0, 0, img.width, img.height)


def _lbp_codes(arr: np.ndarray) -> np.ndarray:
    h, w = arr.shape
    padded = np.pad(arr, 1, mode="edge")
    codes = np.zeros((h, w), dtype=np.uint8)
    for dy, dx, bit in NEIGHBOR_OFFSETS:
        neighbor = padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
        codes |= (neighbor >= arr).astype(np.uint8) << bit
    return codes


def lbp_map(img: GrayImage) -> LbpImage:
    """8-neighbour LBP code per pixel with clamp-to-edge borders."""
    codes = _lbp_codes(img.to_array())
    return LbpImage(img.width, img.height, codes.tobytes())


def cell_histograms(codes: np.ndarray) -> np.ndarray:
    """Normalized per-cell histograms of a 128x128 code map, shape ``(8, 8, 256)``."""
    cells = codes.reshape(GRID, CELL, GRID, CELL).transpose(0, 2, 1, 3)
    flat = cells.reshape(GRID * GRID, CELL * CELL).astype(np.int64)
    offsets = np.arange(GRID * GRID, dtype=np.int64)[:, None] * BINS
    counts = np.bincount((flat + offsets).ravel(), minlength=GRID * GRID * BINS)
    return (counts.reshape(GRID, GRID, BINS) / float(CELL * CELL)).astype(np.float64)


@dataclass(frozen=True, eq=False)
class FaceTemplate:
    """One enrolled identity: a label and an 8x8 grid of LBP histograms."""

    label: str
    grid: np.ndarray

    def __post_init__(self):
        if not self.label:
            raise EmptyLabel("template label must be non-empty")
        grid = np.asarray(self.grid, dtype=np.float64)
        if grid.shape != (GRID, GRID, BINS):
            raise LengthMismatch(f"template grid must be {(GRID, GRID, BINS)}, got {grid.shape}")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    def __eq__(self, other):
        if not isinstance(other, FaceTemplate):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.grid, other.grid)

    __hash__ = None


def extract_template(img: GrayImage, face: Rect, label: str) -> FaceTemplate:
    if not label:
        raise EmptyLabel("template label must be non-empty")
    if not face.fits(img):
        raise ValueError(f"{face} does not lie inside a {img.width}x{img.height} image")
    crop = img.to_array()[face.y : face.y + face.h, face.x : face.x + face.w]
    norm = resize_nearest(GrayImage.from_array(crop), FACE_SIZE, FACE_SIZE)
    return FaceTemplate(label, cell_histograms(_lbp_codes(norm.to_array())))


def _chi_square_sum(a: np.ndarray, b: np.ndarray) -> float:
    total = a + b
    diff = a - b
    terms = np.divide(diff * diff, total, out=np.zeros_like(total), where=total > 0)
    return float(terms.sum())


def chi_square(a: Sequence[float], b: Sequence[float]) -> float:
    """Sum of ``(a_i - b_i)^2 / (a_i + b_i)`` over bins with a non-zero denominator."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != (BINS,) or b.shape != (BINS,):
        raise LengthMismatch(f"histograms must have {BINS} bins, got {a.shape} and {b.shape}")
    return _chi_square_sum(a, b)


def template_distance(a: FaceTemplate, b: FaceTemplate) -> float:
    return _chi_square_sum(a.grid, b.grid)


@dataclass(frozen=True)
class FaceDb:
    """Ordered, immutable collection of templates with unique labels."""

    templates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        templates = tuple(self.templates)
        seen = set()
        for t in templates:
            if t.label in seen:
                raise DuplicateLabel(f"label {t.label!r} enrolled twice")
            seen.add(t.label)
        object.__setattr__(self, "templates", templates)

    def __len__(self):
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates)

    @property
    def labels(self) -> list[str]:
        return [t.label for t in self.templates]


@dataclass(frozen=True)
class Match:
    label: str
    distance: float


@dataclass(frozen=True)
class NoMatch:
    best_distance: Optional[float] = None


MatchResult = Union[Match, NoMatch]


def enroll(
    db: FaceDb, label: str, img: GrayImage, detector: FaceDetector = detect_face
) -> FaceDb:
    if label in db.labels:
        raise DuplicateLabel(f"label {label!r} already enrolled")
    return FaceDb(db.templates + (extract_template(img, detector(img), label),))


def identify(
    db: FaceDb,
    img: GrayImage,
    threshold: float = DEFAULT_THRESHOLD,
    detector: FaceDetector = detect_face,
) -> MatchResult:
    """Nearest enrolled template, accepted when its distance is within ``threshold``.

    Ties go to the earliest enrollment.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    if not db.templates:
        return NoMatch()
    probe = extract_template(img, detector(img), "probe")
    best_label, best = None, float("inf")
    for t in db.templates:
        d = template_distance(t, probe)
        if d < best:
            best_label, best = t.label, d
    if best <= threshold:
        return Match(best_label, best)
    return NoMatch(best)

"""Netpbm (PGM/PPM) codecs and the grayscale conversion feeding the face pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GrayImage",
    "RgbImage",
    "ImageFormatError",
    "UnknownMagic",
    "UnsupportedMaxval",
    "Truncated",
    "MalformedHeader",
    "BadSample",
    "ZeroDimension",
    "load_pgm",
    "save_pgm",
    "load_ppm",
    "save_ppm",
    "rgb_to_gray",
    "resize_nearest",
]

_WHITESPACE = b" \t\r\n\v\f"


class ImageFormatError(ValueError):
    """Raised when netpbm bytes cannot be decoded."""


class UnknownMagic(ImageFormatError):
    pass


class UnsupportedMaxval(ImageFormatError):
    pass


class Truncated(ImageFormatError):
    pass


class MalformedHeader(ImageFormatError):
    pass


class BadSample(ImageFormatError):
    """An ASCII sample is not an integer in [0, maxval]."""


class ZeroDimension(ValueError):
    pass


@dataclass(frozen=True)
class GrayImage:
    """8-bit single-channel raster stored row-major."""

    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ZeroDimension(f"image must be at least 1x1, got {self.width}x{self.height}")
        data = bytes(self.data)
        if len(data) != self.width * self.height:
            raise ValueError(
                f"expected {self.width * self.height} samples, got {len(data)}"
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, arr) -> GrayImage:
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("intensities must lie in [0, 255]")
        h, w = arr.shape
        return cls(w, h, arr.astype(np.uint8).tobytes())

    def to_array(self) -> np.ndarray:
        """Return a read-only ``(height, width)`` uint8 view."""
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width)

    def pixel(self, x: int, y: int) -> int:
        return self.data[y * self.width + x]


@dataclass(frozen=True)
class RgbImage:
    """8-bit RGB raster stored as row-major (r, g, b) triples."""

    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ZeroDimension(f"image must be at least 1x1, got {self.width}x{self.height}")
        data = bytes(self.data)
        if len(data) != 3 * self.width * self.height:
            raise ValueError(
                f"expected {3 * self.width * self.height} channel values, got {len(data)}"
            )
        object.__setattr__(self, "data", data)

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width, 3)


def _read_header(buf: bytes, magics: dict[bytes, bool]):
    """Parse ``magic width height maxval``.

    Returns ``(binary, width, height, offset)`` where ``offset`` points at the
    first payload byte. ``#`` comments run to end of line and may appear
    between any two header tokens.
    """
    magic = buf[:2]
    if magic not in magics:
        raise UnknownMagic(f"unsupported magic number {magic!r}")
    binary = magics[magic]

    pos = 2
    tokens = []
    while len(tokens) < 3:
        if pos >= len(buf):
            raise MalformedHeader("header ended before width, height and maxval")
        ch = buf[pos : pos + 1]
        if ch[0] in _WHITESPACE:
            pos += 1
            continue
        if ch == b"#":
            nl = buf.find(b"\n", pos)
            pos = len(buf) if nl < 0 else nl + 1
            continue
        start = pos
        while pos < len(buf) and buf[pos] not in _WHITESPACE and buf[pos : pos + 1] != b"#":
            pos += 1
        tok = buf[start:pos]
        if not tok.isdigit():
            raise MalformedHeader(f"expected a decimal integer in header, got {tok!r}")
        tokens.append(int(tok))

    width, height, maxval = tokens
    if width < 1 or height < 1:
        raise MalformedHeader(f"non-positive dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval must be 255, got {maxval}")

    if binary:
        # exactly one whitespace byte separates maxval from the raster
        if pos >= len(buf) or buf[pos] not in _WHITESPACE:
            raise MalformedHeader("missing whitespace after maxval")
        pos += 1
    return binary, width, height, pos


def _read_samples(buf: bytes, binary: bool, count: int, offset: int) -> bytes:
    if binary:
        payload = buf[offset : offset + count]
        if len(payload) < count:
            raise Truncated(f"expected {count} samples, found {len(payload)}")
        return payload

    text = buf[offset:]
    values = []
    for line in text.split(b"\n"):
        line = line.split(b"#", 1)[0]
        for tok in line.split():
            if not tok.isdigit() or int(tok) > 255:
                raise BadSample(f"invalid sample {tok!r}")
            values.append(int(tok))
            if len(values) == count:
                return bytes(values)
    raise Truncated(f"expected {count} samples, found {len(values)}")


def load_pgm(buf: bytes) -> GrayImage:
    """Decode a P2 or P5 graymap with maxval 255."""
    binary, width, height, offset = _read_header(bytes(buf), {b"P2": False, b"P5": True})
    return GrayImage(width, height, _read_samples(buf, binary, width * height, offset))


def save_pgm(img: GrayImage) -> bytes:
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.data


def load_ppm(buf: bytes) -> RgbImage:
    """Decode a P3 or P6 pixmap with maxval 255."""
    binary, width, height, offset = _read_header(bytes(buf), {b"P3": False, b"P6": True})
    return RgbImage(width, height, _read_samples(buf, binary, 3 * width * height, offset))


def save_ppm(img: RgbImage) -> bytes:
    return b"P6\n%d %d\n255\n" % (img.width, img.height) + img.data


def rgb_to_gray(img: RgbImage) -> GrayImage:
    """BT.601 luma, rounded half-up.

    Integer arithmetic keeps the result exact: the weights are expressed in
    thousandths, so ``(299 R + 587 G + 114 B + 500) // 1000`` is the rounded
    luma and can never exceed 255.
    """
    rgb = img.to_array().astype(np.int32)
    luma = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
    return GrayImage(img.width, img.height, np.clip(luma, 0, 255).astype(np.uint8).tobytes())


def resize_nearest(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    if out_w < 1 or out_h < 1:
        raise ZeroDimension(f"target size must be at least 1x1, got {out_w}x{out_h}")
    if (out_w, out_h) == (img.width, img.height):
        return img
    cols = np.arange(out_w) * img.width // out_w
    rows = np.arange(out_h) * img.height // out_h
    src = img.to_array()
    return GrayImage(out_w, out_h, src[np.ix_(rows, cols)].tobytes())

"""Deterministic stand-in for the photo hosting service."""

FNV64_OFFSET_BASIS = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
UPLOAD_BASE_URL = "https://sim.local/img/"

_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


def upload_stub(image_bytes: bytes) -> str:
    """Return the content-addressed URL the image would be "hosted" at."""
    return "%s%016x" % (UPLOAD_BASE_URL, fnv1a_64(bytes(image_bytes)))

import pytest
from hypothesis import given
from hypothesis import strategies as st

from motoguard.imaging import (
    BadSample,
    GrayImage,
    MalformedHeader,
    RgbImage,
    Truncated,
    UnknownMagic,
    UnsupportedMaxval,
    ZeroDimension,
    load_pgm,
    load_ppm,
    resize_nearest,
    rgb_to_gray,
    save_pgm,
    save_ppm,
)

SQUARE = GrayImage(2, 2, bytes([0, 255, 128, 64]))


@st.composite
def gray_images(draw, max_side=12):
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    return GrayImage(w, h, draw(st.binary(min_size=w * h, max_size=w * h)))


def test_load_ascii_pgm():
    assert load_pgm(b"P2\n2 2\n255\n0 255 128 64") == SQUARE


def test_load_binary_pgm_matches_ascii():
    assert load_pgm(b"P5\n2 2\n255\n" + bytes([0x00, 0xFF, 0x80, 0x40])) == SQUARE


def test_header_comments_between_tokens():
    raw = b"P2\n# made by hand\n2 # width\n2\n# maxval next\n255\n0 255\n128 64\n"
    assert load_pgm(raw) == SQUARE


def test_binary_payload_may_start_with_whitespace_byte():
    # 0x0A is a sample here, not header whitespace
    img = load_pgm(b"P5\n1 1\n255\n\n")
    assert img.data == b"\n"


@pytest.mark.parametrize(
    "raw, exc",
    [
        (b"P2\n2 2\n65535\n0 1 2 3", UnsupportedMaxval),
        (b"P6\n1 1\n255\n\x00\x00\x00", UnknownMagic),
        (b"XX", UnknownMagic),
        (b"P2\n2 2\n255\n0 1 2", Truncated),
        (b"P5\n2 2\n255\n\x00", Truncated),
        (b"P2\n2\n", MalformedHeader),
        (b"P2\n2 x\n255\n", MalformedHeader),
        (b"P2\n0 2\n255\n", MalformedHeader),
        (b"P5\n1 1\n255", MalformedHeader),
        (b"P2\n1 1\n255\n300", BadSample),
    ],
)
def test_load_pgm_errors(raw, exc):
    with pytest.raises(exc):
        load_pgm(raw)


def test_save_pgm_header_and_samples():
    assert save_pgm(GrayImage(1, 1, b"\x07")) == b"P5\n1 1\n255\n\x07"
    assert save_pgm(SQUARE) == b"P5\n2 2\n255\n\x00\xff\x80\x40"


@given(gray_images())
def test_pgm_round_trip(img):
    assert load_pgm(save_pgm(img)) == img


def test_load_ppm_ascii_and_binary():
    red = RgbImage(1, 1, b"\xff\x00\x00")
    assert load_ppm(b"P3\n1 1\n255\n255 0 0") == red
    assert load_ppm(b"P6\n1 1\n255\n\xff\x00\x00") == red
    assert load_ppm(save_ppm(red)) == red


def test_load_ppm_truncated():
    with pytest.raises(Truncated):
        load_ppm(b"P3\n1 1\n255\n255 0")
    with pytest.raises(UnknownMagic):
        load_ppm(b"P5\n1 1\n255\n\x00")


@pytest.mark.parametrize(
    "rgb, gray",
    [((255, 255, 255), 255), ((0, 0, 0), 0), ((255, 0, 0), 76), ((0, 255, 0), 150), ((0, 0, 255), 29)],
)
def test_rgb_to_gray(rgb, gray):
    assert rgb_to_gray(RgbImage(1, 1, bytes(rgb))).data == bytes([gray])


@given(st.integers(0, 255))
def test_gray_balanced_pixels_are_fixed_points(v):
    assert rgb_to_gray(RgbImage(1, 1, bytes([v, v, v]))).data == bytes([v])


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_rgb_to_gray_matches_float_formula(r, g, b):
    expected = int(0.299 * r + 0.587 * g + 0.114 * b + 0.5 + 1e-9)
    assert rgb_to_gray(RgbImage(1, 1, bytes([r, g, b]))).data[0] == expected


def test_resize_identity_and_upscale():
    assert resize_nearest(SQUARE, 2, 2) == SQUARE
    assert resize_nearest(GrayImage(1, 1, b"\x09"), 3, 3).data == b"\x09" * 9
    assert list(resize_nearest(GrayImage(2, 1, bytes([10, 20])), 4, 1).data) == [10, 10, 20, 20]


def test_resize_rejects_zero():
    with pytest.raises(ZeroDimension):
        resize_nearest(SQUARE, 0, 3)


@given(gray_images(), st.integers(1, 20), st.integers(1, 20))
def test_resize_introduces_no_new_values(img, w, h):
    out = resize_nearest(img, w, h)
    assert (out.width, out.height) == (w, h)
    assert set(out.data) <= set(img.data)


@given(gray_images(), st.integers(1, 20), st.integers(1, 20))
def test_resize_index_rule(img, w, h):
    out = resize_nearest(img, w, h)
    for y in range(h):
        for x in range(w):
            assert out.pixel(x, y) == img.pixel(x * img.width // w, y * img.height // h)


def test_gray_image_validates_length():
    with pytest.raises(ValueError):
        GrayImage(2, 2, b"\x00")
    with pytest.raises(ZeroDimension):
        GrayImage(0, 1, b"")

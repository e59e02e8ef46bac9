import numpy as np
import pytest

from holderexp.exceptions import ParseError
from holderexp.field import AngularPiecewise, GridSampled, Rect, SharpFamily
from holderexp.parsers import format_field, parse_field, parse_weights

HALF = np.pi
TWO_PI = 2 * np.pi


def test_angular_roundtrip():
    text = f"""# two sectors
variant: angular
rotate: false
arc 0.0 {HALF!r} 1.0 2.0
arc {HALF!r} {TWO_PI!r} 4.0 0.5
"""
    f = parse_field(text)
    assert isinstance(f, AngularPiecewise) and not f.rotate
    again = parse_field(format_field(f))
    np.testing.assert_array_equal(again.describe()["arcs"], f.describe()["arcs"])


def test_sharp_and_domain():
    f = parse_field("variant: sharp\ndomain: rect -1 -2 1 2\ntau 0.5\nM: 1.2\n")
    assert isinstance(f, SharpFamily) and f.M == 1.2 and isinstance(f.domain, Rect)
    assert parse_field(format_field(f)).tau == 0.5


def test_grid_layout_is_x_fastest():
    rows = "\n".join(f"{1 + i} 0 1" for i in range(6))
    f = parse_field(f"variant: grid\n3 2 0 0 1 1\n{rows}\n")
    assert isinstance(f, GridSampled)
    assert f.a11[0, 2] == 3.0 and f.a11[1, 0] == 4.0


@pytest.mark.parametrize("text,needle,line", [
    ("", "empty", None),
    ("rotate: true\n", "first line", 1),
    ("variant: spiral\n", "unknown variant", 1),
    ("variant: angular\narc 0 1 1 1\narc 1.5 6.283185307179586 1 1\n", "gap", 3),
    ("variant: angular\narc 0 3 1 1\n", "gap", 2),
    ("variant: angular\narc 0 4 1 1\narc 3 6.283185307179586 1 1\n", "overlaps", 3),
    ("variant: angular\narc 0 6.283185307179586 -1 1\n", "positive", 2),
    ("variant: angular\narc 0 x 1 1\n", "could not read", 2),
    ("variant: sharp\ntau 0.5\n", "missing M", None),
    ("variant: sharp\ntau 2\nM 2\n", "tau", None),
    ("variant: grid\n2 1 0 0 1 1\n1 0 1\n", "needs 2", 3),
])
def test_parse_errors(text, needle, line):
    with pytest.raises(ParseError) as info:
        parse_field(text)
    assert needle in str(info.value)
    if line is not None:
        assert f"line {line}" in str(info.value)


def test_weights():
    w = parse_weights(f"arc 0 {HALF!r} 1 4\narc {HALF!r} {TWO_PI!r} 2 0.5\n")
    assert w.a(np.array([1.0]))[0] == 1.0 and w.b(np.array([4.0]))[0] == 0.5
    with pytest.raises(ParseError):
        parse_weights("variant: angular\n")

"""Readers for the line-oriented field and weight files.

Field file::

    # comments start with '#'
    variant: angular            # or: sharp, grid
    rotate: true                # angular only, default true
    domain: disk 1.0            # optional: 'disk R' or 'rect x0 y0 x1 y1'
    arc 0.0 1.5707963267948966 1.0 1.0
    arc 1.5707963267948966 6.283185307179586 4.0 4.0

``sharp`` takes ``tau <v>`` and ``M <v>`` lines.  ``grid`` takes one line
``nx ny x0 y0 dx dy`` followed by ``nx*ny`` lines ``a11 a12 a22`` with x
varying fastest.  Weight files hold ``arc <start> <end> <a> <b>`` lines.
Angles are radians in decimal notation.
"""

import numpy as np

from .exceptions import HolderError, ParseError
from .field import AngularPiecewise, Disk, GridSampled, Rect, SharpFamily
from .wirtinger import WeightPair

TWO_PI = 2.0 * np.pi
_ANGLE_TOL = 1e-9


def _lines(text):
    """(line number, tokens) for every non-empty line, comments stripped."""
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield number, body


def _floats(tokens, count, number, what):
    if len(tokens) != count:
        raise ParseError(f"{what} needs {count} numbers, got {len(tokens)}", number)
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ParseError(f"{what}: could not read numbers from {' '.join(tokens)!r}",
                         number) from None


def _keyvalue(body):
    key, _, value = body.partition(":")
    return key.strip().lower(), value.strip()


def _arcs(entries):
    """Validate arc lines ``(number, start, end, p, q)`` covering [0, 2pi)."""
    if not entries:
        raise ParseError("no arc lines found")
    entries = sorted(entries, key=lambda e: e[1])
    cursor = 0.0
    starts, first, second = [], [], []
    for number, start, end, p, q in entries:
        if end <= start:
            raise ParseError(f"arc end {end} does not exceed its start {start}", number)
        if start > cursor + _ANGLE_TOL:
            raise ParseError(f"gap in arc coverage: [{cursor!r}, {start!r}) is not covered",
                             number)
        if start < cursor - _ANGLE_TOL:
            raise ParseError(f"arc starting at {start!r} overlaps the previous arc ending "
                             f"at {cursor!r}", number)
        starts.append(cursor if starts else 0.0)
        first.append(p)
        second.append(q)
        cursor = end
    if cursor < TWO_PI - _ANGLE_TOL:
        raise ParseError(f"gap in arc coverage: [{cursor!r}, 2pi) is not covered",
                         entries[-1][0])
    if cursor > TWO_PI + _ANGLE_TOL:
        raise ParseError(f"arcs extend past 2pi (last end {cursor!r})", entries[-1][0])
    return np.array(starts), np.array(first), np.array(second)


def _arc_entry(tokens, number):
    start, end, p, q = _floats(tokens[1:], 4, number, "arc")
    if p <= 0 or q <= 0:
        raise ParseError("arc coefficients must be positive", number)
    return number, start, end, p, q


def _domain(value, number):
    tokens = value.split()
    if not tokens:
        raise ParseError("empty domain specification", number)
    kind = tokens[0].lower()
    if kind == "disk":
        (radius,) = _floats(tokens[1:], 1, number, "disk domain")
        if radius <= 0:
            raise ParseError("disk radius must be positive", number)
        return Disk(radius)
    if kind == "rect":
        x0, y0, x1, y1 = _floats(tokens[1:], 4, number, "rect domain")
        if x1 <= x0 or y1 <= y0:
            raise ParseError("rect domain must have x1 > x0 and y1 > y0", number)
        return Rect(x0, y0, x1, y1)
    raise ParseError(f"unknown domain kind {kind!r}", number)


def parse_field(text):
    """Build a coefficient field from the text of a field file."""
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty field file")
    number, body = lines[0]
    key, variant = _keyvalue(body)
    if key != "variant":
        raise ParseError("first line must be 'variant: angular|grid|sharp'", number)
    variant = variant.lower()
    rest = lines[1:]
    try:
        if variant == "angular":
            return _parse_angular(rest)
        if variant == "sharp":
            return _parse_sharp(rest)
        if variant == "grid":
            return _parse_grid(rest)
    except ParseError:
        raise
    except HolderError as err:
        raise ParseError(str(err)) from err
    raise ParseError(f"unknown variant {variant!r}", number)


def _parse_angular(lines):
    rotate, domain, arcs = True, None, []
    for number, body in lines:
        tokens = body.split()
        if tokens[0].lower() == "arc":
            arcs.append(_arc_entry(tokens, number))
            continue
        key, value = _keyvalue(body)
        if key == "rotate":
            if value.lower() not in ("true", "false"):
                raise ParseError("rotate must be 'true' or 'false'", number)
            rotate = value.lower() == "true"
        elif key == "domain":
            domain = _domain(value, number)
        else:
            raise ParseError(f"unexpected line {body!r}", number)
    starts, k1, k2 = _arcs(arcs)
    return AngularPiecewise(starts, k1, k2, rotate=rotate, domain=domain)


def _parse_sharp(lines):
    values, domain = {}, None
    for number, body in lines:
        if body.lower().startswith("domain"):
            domain = _domain(_keyvalue(body)[1], number)
            continue
        tokens = body.replace(":", " ").split()
        name = tokens[0]
        if name not in ("tau", "M"):
            raise ParseError(f"unexpected line {body!r}; sharp fields take 'tau' and 'M'",
                             number)
        (values[name],) = _floats(tokens[1:], 1, number, name)
    missing = [k for k in ("tau", "M") if k not in values]
    if missing:
        raise ParseError(f"sharp field is missing {', '.join(missing)}")
    return SharpFamily(values["tau"], values["M"], domain)


def _parse_grid(lines):
    if not lines:
        raise ParseError("grid header 'nx ny x0 y0 dx dy' is missing")
    number, body = lines[0]
    nx, ny, x0, y0, dx, dy = _floats(body.split(), 6, number, "grid header")
    if nx != int(nx) or ny != int(ny) or nx < 1 or ny < 1:
        raise ParseError("nx and ny must be positive integers", number)
    nx, ny = int(nx), int(ny)
    rows = lines[1:]
    if len(rows) != nx * ny:
        raise ParseError(f"grid needs {nx * ny} matrix lines, found {len(rows)}",
                         rows[-1][0] if rows else number)
    data = np.array([_floats(b.split(), 3, n, "grid entry") for n, b in rows])
    shape = (ny, nx)
    return GridSampled(x0, y0, dx, dy, data[:, 0].reshape(shape),
                       data[:, 1].reshape(shape), data[:, 2].reshape(shape))


def parse_weights(text):
    """Build a piecewise-constant :class:`WeightPair` from ``arc`` lines."""
    arcs = []
    for number, body in _lines(text):
        tokens = body.split()
        if tokens[0].lower() != "arc":
            raise ParseError(f"unexpected line {body!r}; weight files hold arc lines",
                             number)
        arcs.append(_arc_entry(tokens, number))
    starts, a, b = _arcs(arcs)
    return WeightPair.piecewise_constant(starts, a, b)


def read_field(path):
    with open(path) as fh:
        return parse_field(fh.read())


def read_weights(path):
    with open(path) as fh:
        return parse_weights(fh.read())


def format_field(field):
    """Inverse of :func:`parse_field` for angular and sharp fields."""
    desc = field.describe()
    if desc["variant"] == "sharp":
        return f"variant: sharp\ntau {field.tau!r}\nM {field.M!r}\n"
    if desc["variant"] == "angular":
        lines = ["variant: angular", f"rotate: {'true' if field.rotate else 'false'}"]
        lines += [f"arc {s!r} {e!r} {p!r} {q!r}" for s, e, p, q in desc["arcs"]]
        return "\n".join(lines) + "\n"
    raise ValueError("only angular and sharp fields have a text form")

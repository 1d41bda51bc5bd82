"""Lossless text encodings shared by the command line and the render sidecar.

Floats are written with 17 significant digits so every binary64 value
round-trips. Complex numbers become ``[re, im]``; the point at infinity of
the sphere becomes the string ``"inf"``; NaN and infinite reals become
``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re

import numpy as np

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"^[+-]?{_NUM}$")
_FULL_RE = re.compile(rf"^(?P<re>[+-]?{_NUM})(?P<im>[+-]{_NUM}|[+-])i$")
_IMAG_RE = re.compile(rf"^(?P<im>[+-]?{_NUM}|[+-]?)i$")


def _imag(text):
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def parse_complex(text):
    """Parse ``"RE+IMi"``; either part may be omitted, whitespace is rejected.

    >>> parse_complex("1.5-2e-3i")
    (1.5-0.002j)
    >>> parse_complex("-i")
    -1j
    """
    if isinstance(text, str):
        if _REAL_RE.match(text):
            return complex(float(text), 0.0)
        m = _FULL_RE.match(text)
        if m:
            return complex(float(m.group("re")), _imag(m.group("im")))
        m = _IMAG_RE.match(text)
        if m:
            return complex(0.0, _imag(m.group("im")))
    raise ValueError(f"malformed complex literal {text!r}")


def format_float(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def format_complex(v):
    """``"RE+IMi"`` with 17 significant digits; ``"inf"`` at infinity."""
    v = complex(v)
    if math.isinf(v.real) or math.isinf(v.imag):
        return "inf"
    return "%.17g%+.17gi" % (v.real, v.imag)


def to_plain(obj):
    """Convert numpy scalars, tuples and complex values into JSON-ready objects."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        v = complex(obj)
        if math.isinf(v.real) or math.isinf(v.imag):
            return "inf"
        return [v.real, v.imag]
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_plain(v) for v in obj]
    return obj


def _emit(obj, out, indent, level):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + pad)
        for i, (k, v) in enumerate(sorted(obj.items())):
            if i:
                out.append(sep)
            out.append(json.dumps(k) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if not any(isinstance(v, (dict, list)) for v in obj):
            # scalar rows stay on one line
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.append("[" + pad)
        for i, v in enumerate(obj):
            if i:
                out.append(sep)
            _emit(v, out, indent, level + 1)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def _scalar(v):
    out = []
    _emit(v, out, 0, 0)
    return out[0]


def dumps(obj, indent=2):
    """JSON text with sorted keys and 17-digit floats."""
    out = []
    _emit(to_plain(obj), out, indent, 0)
    return "".join(out) + "\n"


def csv_text(header, rows):
    """CSV with floats at 17 significant digits and complex cells as ``RE+IMi``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        s = format_float(v)
        return "" if s == "null" else s
    if isinstance(v, (complex, np.complexfloating)):
        return format_complex(v)
    return "" if v is None else str(v)

"""Canonical JSON: the byte-stable form documents and plans are shared in.

Rules: UTF-8, object keys sorted by code point, compact separators, one
trailing LF. Numbers with an integral value print as plain integers; all
other finite numbers print in lowercase scientific notation with no
trailing zeros (0.2 -> "2e-1", 1550.5 -> "1.5505e3"). NaN and infinities
are rejected. Canonicalizing is idempotent, so equal structures always
serialize to identical bytes regardless of where they came from.
"""

from __future__ import annotations

import json
import math
from decimal import Decimal

_INT_EXACT_LIMIT = 2**53


def canonical_number(x) -> str:
    """Canonical text for one JSON number."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(x, int):
        return str(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"{x} is not representable in JSON")
    if x == 0.0:
        return "0"
    if x.is_integer() and abs(x) <= _INT_EXACT_LIMIT:
        return str(int(x))
    sign, digits, exponent = Decimal(repr(x)).as_tuple()
    while len(digits) > 1 and digits[-1] == 0:
        digits = digits[:-1]
        exponent += 1
    sci_exponent = exponent + len(digits) - 1
    mantissa = str(digits[0])
    if len(digits) > 1:
        mantissa += "." + "".join(str(d) for d in digits[1:])
    return f"{'-' if sign else ''}{mantissa}e{sci_exponent}"


def _write(value, out: list):
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (int, float)):
        out.append(canonical_number(value))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _write(value[key], out)
        out.append("}")
    else:
        raise TypeError(f"{type(value).__name__} is not JSON-serializable")


def canonical_dumps(value) -> str:
    out: list[str] = []
    _write(value, out)
    out.append("\n")
    return "".join(out)


def canonical_bytes(value) -> bytes:
    return canonical_dumps(value).encode("utf-8")


def loads(data) -> object:
    """Parse JSON bytes or text (any formatting, not only canonical)."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    return json.loads(data)

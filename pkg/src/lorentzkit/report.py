"""Structured (JSON) and text renderings of results.

Structured output keeps exact rationals as ``"p/q"`` strings and intervals as
``{"lo": ..., "hi": ...}`` endpoint pairs, so nothing is lost in transit.
The text renderer prints the same numbers as 6-place decimals, each tagged
``exact`` or ``interval``.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from fractions import Fraction
from typing import Any

from .intervals import Interval
from .polycore import VolumePolynomial, format_polynomial


_RATIONAL_TEXT = re.compile(r"^-?\d+(/\d+)?$")


def rational_text(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_jsonable(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rational_text(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, Interval):
        return {"lo": rational_text(obj.lo), "hi": rational_text(obj.hi)}
    if isinstance(obj, VolumePolynomial):
        return {
            "nvars": obj.nvars,
            "degree": obj.degree,
            "terms": [{"exp": list(e), "coeff": rational_text(c)} for e, c in obj.terms.items()],
            "text": format_polynomial(obj),
        }
    if dataclasses.is_dataclass(obj):
        out = {}
        for f in dataclasses.fields(obj):
            if f.name.startswith("_") or f.name == "extra":
                continue
            out[f.name] = to_jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n"


def from_jsonable(obj: Any) -> Any:
    """Inverse of :func:`to_jsonable` for numbers: rationals and intervals come back exact."""
    if isinstance(obj, str) and _RATIONAL_TEXT.match(obj):
        return Fraction(obj)
    if isinstance(obj, dict):
        if set(obj) == {"lo", "hi"}:
            return Interval(Fraction(obj["lo"]), Fraction(obj["hi"]))
        return {k: from_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [from_jsonable(v) for v in obj]
    return obj


def _number_text(value: Any) -> str | None:
    if isinstance(value, str) and _RATIONAL_TEXT.match(value):
        return f"{float(Fraction(value)):.6f} (exact {value})"
    if isinstance(value, dict) and set(value) == {"lo", "hi"}:
        lo, hi = Fraction(value["lo"]), Fraction(value["hi"])
        if lo == hi:
            return f"{float(lo):.6f} (exact {value['lo']})"
        return f"[{float(lo):.6f}, {float(hi):.6f}] (interval)"
    return None


def render_text(payload: Any) -> str:
    lines: list[str] = []
    data = to_jsonable(payload)
    if isinstance(data, dict):
        for k in sorted(data):
            _render(data[k], 0, lines, k)
    else:
        _render(data, 0, lines, None)
    return "\n".join(lines) + "\n"


def _render(value: Any, depth: int, lines: list[str], key: str | None) -> None:
    pad = "  " * depth
    label = f"{key}: " if key is not None else "- "
    number = _number_text(value)
    if number is not None:
        lines.append(pad + label + number)
    elif isinstance(value, dict):
        lines.append(pad + (f"{key}:" if key is not None else "-"))
        depth += 1
        for k in sorted(value):
            _render(value[k], depth, lines, k)
    elif isinstance(value, list):
        if value and all(isinstance(v, str) and _RATIONAL_TEXT.match(v) for v in value):
            shown = ", ".join(f"{float(Fraction(v)):.6f}" for v in value)
            lines.append(pad + label + f"({shown}) (exact " + ", ".join(value) + ")")
        elif all(not isinstance(v, (dict, list)) for v in value):
            lines.append(pad + label + ("[" + ", ".join(str(v) for v in value) + "]"))
        else:
            lines.append(pad + (f"{key}:" if key is not None else "-"))
            for v in value:
                _render(v, depth + 1, lines, None)
    else:
        text = "null" if value is None else str(value).lower() if isinstance(value, bool) else str(value)
        lines.append((pad + label + text).rstrip())

"""
Report Module - Canonical JSON and plain-text rendering of command reports.

JSON output has sorted keys, complex numbers as [re, im], floats with 17
significant digits and no timestamps, so a fixed seed reproduces the same
bytes and parsing then re-serializing a report is the identity. Every
torsion value is emitted next to the mod-sign convention.

Key components:
- `to_jsonable`: Converts numpy scalars, arrays, complex numbers and
  `TorsionValue`s into plain JSON data.
- `dumps_canonical`: The canonical JSON encoder.
- `render_text`: Indented human-readable rendering of the same data.

Integration:
- Used by every command in `cli/commands`.
"""
import json
import math
from typing import Any, List

import numpy as np

from torsion_forge.core.torsion import MOD_SIGN_NOTE, TorsionValue

def _float(x: float) -> Any:
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")

def to_jsonable(value: Any) -> Any:
    if isinstance(value, TorsionValue):
        v = value.canonical()
        return {"value": [_float(v.real), _float(v.imag)], "convention": MOD_SIGN_NOTE}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_float(value.real), _float(value.imag)]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    return value

def _encode(value: Any, indent: int) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        if value == 0:
            return "0.0"
        text = f"{value:.17g}"
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(value, (int, str)):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(key)}: {_encode(value[key], indent + 1)}" for key in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if not value:
        return "[]"
    if all(isinstance(item, (int, float)) and not isinstance(item, bool) for item in value):
        return "[" + ", ".join(_encode(item, indent) for item in value) + "]"
    return "[\n" + ",\n".join(inner + _encode(item, indent + 1) for item in value) + "\n" + pad + "]"

def dumps_canonical(report: Any) -> str:
    return _encode(to_jsonable(report), 0) + "\n"

def _is_torsion(value: Any) -> bool:
    return isinstance(value, dict) and set(value) == {"value", "convention"}

def _scalar_text(value: Any) -> str:
    if _is_torsion(value):
        re, im = value["value"]
        return f"+-({re:.10g}{im:+.10g}i)  [{value['convention']}]"
    if isinstance(value, list) and len(value) == 2 and all(isinstance(x, float) for x in value):
        return f"{value[0]:.10g}{value[1]:+.10g}i"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)

def _lines(value: Any, indent: int) -> List[str]:
    pad = "  " * indent
    lines = []
    for key in sorted(value) if isinstance(value, dict) else range(len(value)):
        item = value[key]
        label = key if isinstance(value, dict) else f"[{key}]"
        nested = (isinstance(item, dict) and not _is_torsion(item)) or (
            isinstance(item, list) and item and isinstance(item[0], (dict, list))
            and not (len(item) == 2 and all(isinstance(x, float) for x in item)))
        if nested:
            lines.append(f"{pad}{label}:")
            lines.extend(_lines(item, indent + 1))
        else:
            lines.append(f"{pad}{label}: {_scalar_text(item)}")
    return lines

def render_text(report: Any) -> str:
    return "\n".join(_lines(to_jsonable(report), 0)) + "\n"

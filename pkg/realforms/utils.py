from __future__ import annotations

import hashlib
from collections.abc import Iterable
from fractions import Fraction
from typing import Any

from .exceptions import InvalidSpecException, RealFormsException

try:
    HAS_ORJSON = True
    import orjson
except ImportError:
    HAS_ORJSON = False
    import json


def _default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "tolist"):  # numpy scalars and arrays
        return obj.tolist()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def json_dumps(obj: Any, indent: bool = True) -> str:
    try:
        if HAS_ORJSON:
            option = orjson.OPT_NON_STR_KEYS | (orjson.OPT_INDENT_2 if indent else 0)
            return orjson.dumps(obj, default=_default, option=option).decode()
        if indent:
            return json.dumps(obj, default=_default, ensure_ascii=False, indent=2)
        return json.dumps(obj, default=_default, ensure_ascii=False, separators=(",", ":"))
    except Exception as ex:
        raise RealFormsException(f"{type(ex).__name__}: {ex}") from ex


def json_loads(obj: str | bytes) -> Any:
    try:
        return orjson.loads(obj) if HAS_ORJSON else json.loads(obj)
    except Exception as ex:
        raise RealFormsException(f"{type(ex).__name__}: {ex}") from ex


def input_digest(inputs: Any) -> str:
    """Sha256 of the canonical JSON form of command inputs."""
    if HAS_ORJSON:
        canonical = orjson.dumps(inputs, default=_default, option=orjson.OPT_SORT_KEYS | orjson.OPT_NON_STR_KEYS)
    else:
        canonical = json.dumps(inputs, default=_default, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(canonical).hexdigest()


def parse_index_list(text: str | Iterable[int]) -> list[int]:
    """Parse "0,2,5" (or an iterable of ints) into a list of element indices."""
    if not isinstance(text, str):
        return [int(x) for x in text]
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as ex:
        raise InvalidSpecException(f"parse_index_list() {text=} expected comma separated integers") from ex


def histogram_items(histogram: dict[int, int]) -> list[list[int]]:
    """Dict histogram as a sorted list of [key, count] pairs."""
    return [[k, histogram[k]] for k in sorted(histogram)]

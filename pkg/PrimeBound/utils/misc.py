import math
from collections.abc import Iterator
from fractions import Fraction
from typing import Any

SIGNIFICANT_DIGITS = 12


def fmt_real(value: float | Fraction | None) -> float | None:
    """
    Round a real to 12 significant digits so reports are byte-identical across runs.

    Args:
        value: The number to round; None passes through.

    Returns:
        float | None: The rounded value. Non-finite floats are returned unchanged.
    """
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return value
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def flatten(data: Any, prefix: str = "") -> Iterator[tuple[str, Any]]:
    """
    Yield (dotted key, scalar) pairs from nested dicts and lists, depth first.

    Lists of scalars are joined with spaces so each key stays a single cell.
    """
    if isinstance(data, dict):
        for key, value in data.items():
            yield from flatten(value, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(data, list) and any(isinstance(v, dict | list) for v in data):
        for index, value in enumerate(data):
            yield from flatten(value, f"{prefix}.{index}")
    elif isinstance(data, list):
        yield prefix, " ".join(str(v) for v in data)
    else:
        yield prefix, data

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def wrap_angle(angle: float) -> float:
    """Wrap angle (radians) into the principal interval (-pi, pi]."""
    result = math.remainder(angle, 2 * math.pi)  # [-pi, pi]
    if result <= -math.pi:
        result += 2 * math.pi
    return result


def format_float(value: float, digits: int = 12) -> str:
    """Format float with fixed significant digits, without negative zero."""
    return f"{value + 0.0:.{digits}g}"


def map_ordered(
    func: Callable[[T], R],
    items: Iterable[T],
    max_workers: int | None = None,
) -> list[R]:
    """
    Apply `func` to all items, optionally in a thread pool.

    Results are always returned in the order of `items`.
    """
    if max_workers is None or max_workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(func, items))

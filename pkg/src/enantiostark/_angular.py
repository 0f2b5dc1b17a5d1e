"""
Angular momentum algebra for integer angular momenta.

Wigner 3-j symbols are evaluated with the Racah sum formula in exact rational arithmetic. The
alternating sum cancels heavily at large j, so the square of the symbol is formed as a fraction of
integers and rounded to double precision once.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from scipy.special import factorial

from enantiostark._exceptions import ArgumentError

#: Largest angular momentum supported by the factorial table
J_LIMIT = 40

_FACTORIALS = [int(factorial(n, exact=True)) for n in range(3 * J_LIMIT + 2)]


def _check_integer(name: str, value: int):
    if isinstance(value, bool) or int(value) != value:
        raise ArgumentError(f"{name} must be an integer, got {value!r}")


def wigner3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """
    Wigner 3-j symbol.

    Physically invalid combinations (m-sum, triangle rule, |m| > j) evaluate to exactly 0.

    Args:
        j1, j2, j3: Non-negative integer angular momenta (<= 40)
        m1, m2, m3: Integer projections

    Raises:
        ArgumentError: If an argument is not an integer, a j is negative or exceeds the table
    """
    args = {"j1": j1, "j2": j2, "j3": j3, "m1": m1, "m2": m2, "m3": m3}
    for name, value in args.items():
        _check_integer(name, value)
    for name in ("j1", "j2", "j3"):
        if args[name] < 0:
            raise ArgumentError(f"{name} must be non-negative, got {args[name]}")
        if args[name] > J_LIMIT:
            raise ArgumentError(f"{name} exceeds supported maximum {J_LIMIT}, got {args[name]}")
    return _wigner3j(*(int(value) for value in args.values()))


@lru_cache(maxsize=None)
def _wigner3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    if m1 + m2 + m3 != 0:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if j3 > j1 + j2 or j3 < abs(j1 - j2):
        return 0.0

    f = _FACTORIALS
    t1 = j2 - m1 - j3
    t2 = j1 + m2 - j3
    t3 = j1 + j2 - j3
    t4 = j1 - m1
    t5 = j2 + m2

    tmin = max(0, t1, t2)
    tmax = min(t3, t4, t5)

    racah_sum = sum(
        Fraction(
            -1 if t % 2 else 1,
            f[t] * f[t - t1] * f[t - t2] * f[t3 - t] * f[t4 - t] * f[t5 - t],
        )
        for t in range(tmin, tmax + 1)
    )
    if racah_sum == 0:
        return 0.0

    triangle = Fraction(
        f[j1 + j2 - j3] * f[j1 - j2 + j3] * f[-j1 + j2 + j3], f[j1 + j2 + j3 + 1]
    )
    squared = (
        triangle
        * f[j1 + m1]
        * f[j1 - m1]
        * f[j2 + m2]
        * f[j2 - m2]
        * f[j3 + m3]
        * f[j3 - m3]
        * racah_sum**2
    )
    sign = -1.0 if (j1 - j2 - m3) % 2 else 1.0
    if racah_sum < 0:
        sign = -sign
    return sign * math.sqrt(float(squared))

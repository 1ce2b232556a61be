"""Catalan numbers and the stationary solution of the infinite Riccati system.

Catalan numbers are produced by the self-convolution recurrence and checked
against the closed form ``(2n)! / (n! (n+1)!)`` evaluated through the ratio
``C_n = C_{n-1} * 2(2n-1) / (n+1)``, so no factorial is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CatalanOverflowError, DomainError

__all__ = [
    "INT64_MAX",
    "CatalanSequence",
    "StationarySolution",
    "catalan_sequence",
    "catalan_asymptotic_ratio",
    "stationary_solution",
]

INT64_MAX = 2**63 - 1
#: largest index whose exactness is part of the contract (C_30 ~ 3.8e15)
GUARANTEED_N_MAX = 30


@dataclass(frozen=True)
class CatalanSequence:
    n_max: int
    values: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class StationarySolution:
    """Stationary Catalan functions for ``eps = 1``."""

    i_max: int
    values: tuple[float, ...]

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)


def _check_width(n: int, value: int) -> int:
    if value > INT64_MAX:
        raise CatalanOverflowError(
            f"C_{n} = {value} exceeds the 64-bit exact range"
        )
    return value


def catalan_by_ratio(n_max: int) -> list[int]:
    """Closed-form Catalan numbers via the exact ratio identity."""
    out = [1]
    for n in range(1, n_max + 1):
        num = out[-1] * 2 * (2 * n - 1)
        q, r = divmod(num, n + 1)
        if r:
            raise ArithmeticError(f"ratio identity not exact at n={n}")
        out.append(_check_width(n, q))
    return out


def catalan_sequence(n_max: int) -> CatalanSequence:
    """Return ``C_0 .. C_{n_max}`` from the convolution recurrence.

    Exactness is guaranteed up to ``n_max = 30``; larger indices are computed
    until a value leaves the signed 64-bit range, at which point
    :class:`CatalanOverflowError` is raised.

    >>> catalan_sequence(5).values
    (1, 1, 2, 5, 14, 42)
    """
    if not isinstance(n_max, int) or isinstance(n_max, bool) or n_max < 0:
        raise DomainError(f"n_max must be a non-negative integer, got {n_max!r}")
    values = [1]
    for n in range(1, n_max + 1):
        total = 0
        for j in range(1, n + 1):
            total += values[j - 1] * values[n - j]
        values.append(_check_width(n, total))
    closed = catalan_by_ratio(n_max)
    if closed != values:
        raise ArithmeticError("recurrence and closed form disagree")
    return CatalanSequence(n_max=n_max, values=tuple(values))


def catalan_asymptotic_ratio(n: int) -> float:
    """``C_n`` divided by its growth law ``4**n * n**-1.5 / sqrt(pi)``."""
    if not isinstance(n, int) or n < 1 or n > GUARANTEED_N_MAX:
        raise DomainError(f"n must be an integer in [1, {GUARANTEED_N_MAX}], got {n!r}")
    c_n = catalan_sequence(n).values[n]
    return c_n * math.sqrt(math.pi) * n**1.5 / 4.0**n


def stationary_solution(i_max: int) -> StationarySolution:
    """Time-independent solution of the infinite system with ``eps = 1``.

    ``phi^0 = 1``, ``phi^1 = -1/2`` and
    ``phi^i = -1/2 * sum_{j=1}^{i-1} phi^j phi^{i-j}`` for ``i >= 2``.
    """
    if not isinstance(i_max, int) or i_max < 0:
        raise DomainError(f"i_max must be a non-negative integer, got {i_max!r}")
    values = [1.0]
    if i_max >= 1:
        values.append(-0.5)
    for i in range(2, i_max + 1):
        values.append(-0.5 * math.fsum(values[j] * values[i - j] for j in range(1, i)))
    return StationarySolution(i_max=i_max, values=tuple(values))

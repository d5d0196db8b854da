"""Ticket-space combinatorics: sizes, binomials and the rank <-> ticket bijection.

Ranks are 0-based integers in ``[0, N)``; ball values are 1-based. The special
ball is the most significant "digit" of a rank::

    special = rank // C(white_max, white_count) + 1

and the white balls are the combination whose lexicographic index is the
remainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

UINT64_MAX = 2**64 - 1

_PASCAL_ROWS = 71


class ConfigurationError(ValueError):
    """Raised for a game shape that cannot be represented."""


class BinomialOverflowError(OverflowError):
    pass


def _pascal_table(rows: int) -> list[list[int]]:
    table = [[1]]
    for n in range(1, rows):
        prev = table[-1]
        table.append([1] + [prev[k - 1] + prev[k] for k in range(1, n)] + [1])
    return table


_PASCAL = _pascal_table(_PASCAL_ROWS)


def binom(n: int, k: int) -> int:
    """Exact C(n, k), zero when k > n.

    Raises BinomialOverflowError when the value does not fit in 64 unsigned bits.
    """
    if n < 0 or k < 0:
        raise ValueError(f"binom requires n >= 0 and k >= 0, got ({n}, {k})")
    if k > n:
        return 0
    if n < _PASCAL_ROWS:
        result = _PASCAL[n][k]
    else:
        result = 1
        for i in range(min(k, n - k)):
            # exact at every step: result * (n - i) is divisible by (i + 1)
            result = result * (n - i) // (i + 1)
    if result > UINT64_MAX:
        raise BinomialOverflowError(f"C({n}, {k}) exceeds 64 bits")
    return result


@dataclass(frozen=True)
class TicketSpaceConfig:
    """Shape of a lottery game.

    ``white_max`` is the number of white-ball values, ``white_count`` how many
    are drawn per ticket, and ``special_max`` the number of special-ball values.
    """

    white_max: int
    white_count: int
    special_max: int

    def __post_init__(self) -> None:
        if not 1 <= self.white_count <= self.white_max:
            raise ConfigurationError(
                f"need 1 <= white_count <= white_max, got {self.white_count}/{self.white_max}"
            )
        if self.special_max < 1:
            raise ConfigurationError(f"special_max must be >= 1, got {self.special_max}")
        try:
            size = binom(self.white_max, self.white_count) * self.special_max
        except BinomialOverflowError as exc:
            raise ConfigurationError(str(exc)) from exc
        if size > UINT64_MAX:
            raise ConfigurationError(f"space size {size} exceeds 64 bits")

    @property
    def white_combinations(self) -> int:
        return binom(self.white_max, self.white_count)

    @property
    def size(self) -> int:
        return space_size(self)


POWERBALL = TicketSpaceConfig(white_max=69, white_count=5, special_max=26)
# Mega Millions after the April 2025 rule change; before it special_max was 25.
MEGAMILLIONS = TicketSpaceConfig(white_max=70, white_count=5, special_max=24)

PRESETS = {"powerball": POWERBALL, "megamillions": MEGAMILLIONS}


@dataclass(frozen=True, order=True)
class Ticket:
    """A drawn combination: sorted 1-based white balls plus a 1-based special ball.

    Field order makes the natural ordering (special, whites), which is the
    order ranks follow.
    """

    special: int
    whites: tuple[int, ...]

    def __init__(self, whites: Iterable[int], special: int) -> None:
        object.__setattr__(self, "whites", tuple(int(w) for w in whites))
        object.__setattr__(self, "special", int(special))

    def validate(self, config: TicketSpaceConfig) -> None:
        w = self.whites
        if len(w) != config.white_count:
            raise ValueError(f"expected {config.white_count} white balls, got {len(w)}")
        if any(a >= b for a, b in zip(w, w[1:])):
            raise ValueError(f"white balls must be strictly increasing: {w}")
        if w[0] < 1 or w[-1] > config.white_max:
            raise ValueError(f"white balls must lie in [1, {config.white_max}]: {w}")
        if not 1 <= self.special <= config.special_max:
            raise ValueError(f"special ball must lie in [1, {config.special_max}]: {self.special}")

    def __str__(self) -> str:
        return ",".join(map(str, self.whites)) + f" pb {self.special}"


def space_size(config: TicketSpaceConfig) -> int:
    return binom(config.white_max, config.white_count) * config.special_max


def _unrank_whites(n: int, h: int, s: int) -> list[int]:
    # 0-based values in [0, h), strictly increasing
    values = []
    low = 0
    while s > 1:
        i = 1
        while n >= (block := binom(h - low - i, s - 1)):
            n -= block
            i += 1
        values.append(low + i - 1)
        low += i
        s -= 1
    values.append(low + n)
    return values


def _rank_whites(values: list[int], h: int) -> int:
    n = 0
    low = 0
    s = len(values)
    for v in values[:-1]:
        for i in range(1, v - low + 1):
            n += binom(h - low - i, s - 1)
        low = v + 1
        s -= 1
    return n + values[-1] - low


def unrank(r: int, config: TicketSpaceConfig = POWERBALL) -> Ticket:
    """Map a rank in ``[0, N)`` to its ticket."""
    r = int(r)
    size = space_size(config)
    if not 0 <= r < size:
        raise ValueError(f"rank {r} outside [0, {size})")
    per_special, rest = divmod(r, config.white_combinations)
    whites = _unrank_whites(rest, config.white_max, config.white_count)
    return Ticket([v + 1 for v in whites], per_special + 1)


def rank(ticket: Ticket, config: TicketSpaceConfig = POWERBALL) -> int:
    """Inverse of :func:`unrank`."""
    ticket.validate(config)
    rest = _rank_whites([w - 1 for w in ticket.whites], config.white_max)
    return (ticket.special - 1) * config.white_combinations + rest

"""Subsets of {0, ..., n-1} as Python ints (bit i set <=> element i present)."""

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import WidthCapExceeded

MAX_WIDTH = 4096


def mask(elems: Iterable[int]) -> int:
    m = 0
    for e in elems:
        if e < 0:
            raise ValueError(f"negative element {e}")
        m |= 1 << e
    return m


def elements(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


def popcount(m: int) -> int:
    return m.bit_count()


def full(n: int) -> int:
    return (1 << n) - 1


def submasks(m: int) -> Iterator[int]:
    """All submasks of ``m`` including 0, in decreasing order."""
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


def is_subset(a: int, b: int) -> bool:
    return a & b == a


def lowest(m: int) -> int:
    return (m & -m).bit_length() - 1


@dataclass(frozen=True)
class GroundSet:
    """The finite universe {0, ..., n-1}."""

    n: int
    labels: Optional[Sequence[str]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set must be nonempty")
        if self.n > MAX_WIDTH:
            raise WidthCapExceeded(f"n={self.n} exceeds width cap {MAX_WIDTH}")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must have length n")

    @property
    def full(self) -> int:
        return full(self.n)

    def check(self, m: int) -> int:
        if m < 0 or m >> self.n:
            raise ValueError(f"subset {elements(m)} not within ground set of size {self.n}")
        return m


def check_width(n: int) -> None:
    if n > MAX_WIDTH:
        raise WidthCapExceeded(f"ground set width {n} exceeds cap {MAX_WIDTH}")

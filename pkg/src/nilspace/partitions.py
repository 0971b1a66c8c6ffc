"""Integer partitions: conjugation, dominance order, and its lattice.

Partitions of ``n`` are stored zero-padded to length ``n`` so conjugation
and prefix sums are index-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True, slots=True)
class Partition:
    """A weakly decreasing tuple of non-negative integers summing to ``n``,
    zero-padded to length ``n``."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = self.parts
        if not parts:
            raise ValueError("a partition must have at least one part slot")
        total = 0
        prev = parts[0]
        for x in parts:
            if not isinstance(x, int) or x < 0:
                raise ValueError(f"parts must be non-negative integers: {parts!r}")
            if x > prev:
                raise ValueError(f"parts must be weakly decreasing: {parts!r}")
            prev = x
            total += x
        if total != len(parts):
            raise ValueError(
                f"parts must be zero-padded to length n = sum(parts): {parts!r}"
            )

    @classmethod
    def of(cls, parts: Iterable[int]) -> "Partition":
        """Build a partition from any weakly decreasing non-negative sequence,
        padding or trimming trailing zeros to length ``sum(parts)``."""
        seq = [int(x) for x in parts]
        n = sum(seq)
        while seq and seq[-1] == 0:
            seq.pop()
        if len(seq) > n:
            raise ValueError(f"{seq!r} has more nonzero parts than its total")
        return cls(tuple(seq) + (0,) * (n - len(seq)))

    @property
    def n(self) -> int:
        return len(self.parts)

    def nonzero_parts(self) -> tuple[int, ...]:
        return tuple(x for x in self.parts if x)

    def prefix_sums(self) -> tuple[int, ...]:
        out = []
        acc = 0
        for x in self.parts:
            acc += x
            out.append(acc)
        return tuple(out)

    def conjugate(self) -> "Partition":
        """Transpose of the Young diagram: entry ``j`` counts parts >= j+1."""
        n = self.n
        counts = [0] * n
        for x in self.parts:
            for j in range(x):
                counts[j] += 1
        return Partition(tuple(counts))

    def __repr__(self):
        return f"Partition({self.parts!r})"


def conjugate(p: Partition) -> Partition:
    return p.conjugate()


def _check_same_n(a: Partition, b: Partition):
    if a.n != b.n:
        raise ValueError(f"partitions of different totals: {a.n} vs {b.n}")


def dominance_leq(a: Partition, b: Partition) -> bool:
    """True iff every prefix sum of ``a`` is <= the matching prefix sum of ``b``."""
    _check_same_n(a, b)
    sa = 0
    sb = 0
    for x, y in zip(a.parts, b.parts):
        sa += x
        sb += y
        if sa > sb:
            return False
    return True


def dominance_meet(a: Partition, b: Partition) -> Partition:
    """Greatest lower bound in dominance order.

    Computed as the pointwise minimum of prefix sums followed by difference
    extraction; the minimum of two concave sequences is concave, so the
    differences form a valid partition.
    """
    _check_same_n(a, b)
    mins = tuple(min(x, y) for x, y in zip(a.prefix_sums(), b.prefix_sums()))
    parts = []
    prev = 0
    for s in mins:
        parts.append(s - prev)
        prev = s
    return Partition(tuple(parts))


def dominance_join(a: Partition, b: Partition) -> Partition:
    """Least upper bound in dominance order, via the order-reversing
    conjugation: conjugate(meet(conjugate(a), conjugate(b)))."""
    _check_same_n(a, b)
    return dominance_meet(a.conjugate(), b.conjugate()).conjugate()


def partition_bound(a: Partition) -> int:
    """Dimension bound (n^2 - sum of squared conjugate parts) / 2.

    The value is always a non-negative integer for a valid partition;
    integrality is asserted rather than assumed.
    """
    n = a.n
    sq = sum(x * x for x in a.conjugate().parts)
    num = n * n - sq
    if num < 0 or num % 2:
        raise AssertionError(f"bound is not a non-negative integer for {a!r}")
    return num // 2


def partitions_of(n: int) -> Iterator[Partition]:
    """All partitions of ``n`` in descending lexicographic order.

    Intended for small oracles and canonical base enumeration (n <~ 12).
    """
    if n < 0:
        raise ValueError("n must be non-negative")

    def rec(remaining: int, cap: int, prefix: list[int]):
        if remaining == 0:
            yield Partition.of(prefix)
            return
        for k in range(min(cap, remaining), 0, -1):
            prefix.append(k)
            yield from rec(remaining - k, k, prefix)
            prefix.pop()

    if n == 0:
        return
    yield from rec(n, n, [])

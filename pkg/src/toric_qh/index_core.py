"""Conley-Zehnder indices of elliptic, semi-simple symplectic paths.

A path is recorded by its rotation numbers ``rho`` in half-turn units:
block ``i`` of ``Phi(t)`` is the rotation ``t -> exp(pi*sqrt(-1)*rho_i*t)``
for ``t`` in ``[0, 1]``.  Iterating ``k`` times multiplies every rotation
number by ``k``.  With the normalization used throughout this package a
single short positive rotation has index ``+1`` and

    mu(Phi^k) = sum_i (2*floor(k*rho_i/2) + 1).

All arithmetic is exact (:class:`fractions.Fraction`).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import DegenerateIterate

RationalLike = Union[Fraction, int, str]


def to_fraction(value: RationalLike) -> Fraction:
    """Coerce ``value`` to an exact rational, refusing floats."""
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use 'p/q' strings")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_rational(value: Fraction | int) -> str:
    return str(Fraction(value))


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Parse ``"1/3, -1/2"`` into a tuple of fractions."""
    items = [part for part in text.replace(" ", "").split(",") if part]
    return tuple(to_fraction(item) for item in items)


def _floor_half(x: Fraction) -> int:
    # floor(x / 2) on an exact rational
    return x.numerator // (2 * x.denominator)


@dataclass(frozen=True)
class RotationNumbers:
    rho: tuple[Fraction, ...]

    def __init__(self, rho: Iterable[RationalLike]) -> None:
        values = tuple(to_fraction(r) for r in rho)
        if not values:
            raise ValueError("at least one rotation number is required")
        object.__setattr__(self, "rho", values)

    @property
    def n(self) -> int:
        return len(self.rho)

    def iterate(self, k: int) -> "RotationNumbers":
        return RotationNumbers(k * r for r in self.rho)

    def degenerate_block(self, k: int) -> int | None:
        """Index of the first block where ``k*rho_i`` is an even integer, else ``None``."""
        for i, r in enumerate(self.rho):
            x = k * r
            if x.denominator == 1 and x.numerator % 2 == 0:
                return i
        return None

    def is_nondegenerate(self, k: int = 1) -> bool:
        return self.degenerate_block(k) is None

    def __str__(self) -> str:
        return ",".join(format_rational(r) for r in self.rho)


@dataclass(frozen=True)
class IndexDecomposition:
    """Loop/short-path split ``k*rho_i = 2*m_i + lambda_i``."""

    loop_part: tuple[int, ...]
    short_angles: tuple[Fraction, ...]

    @property
    def loop(self) -> int:
        return 2 * sum(self.loop_part)

    @property
    def mean_index(self) -> Fraction:
        return self.loop + sum(self.short_angles, Fraction(0))

    def short_path(self) -> RotationNumbers:
        return RotationNumbers(self.short_angles)


@dataclass(frozen=True)
class Partition:
    """A partition ``k = k_1 + ... + k_r`` stored with parts in non-increasing order."""

    parts: tuple[int, ...]

    def __init__(self, parts: Iterable[int]) -> None:
        values = tuple(sorted((int(p) for p in parts), reverse=True))
        if not values:
            raise ValueError("a partition needs at least one part")
        if values[-1] < 1:
            raise ValueError("partition parts must be positive integers")
        object.__setattr__(self, "parts", values)

    @classmethod
    def uniform(cls, part: int, r: int) -> "Partition":
        return cls([part] * r)

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "+".join(str(p) for p in self.parts) + f"={self.total}"


def _require_nondegenerate(path: RotationNumbers, k: int) -> None:
    if k < 1:
        raise ValueError(f"iterate must be a positive integer, got {k}")
    i = path.degenerate_block(k)
    if i is not None:
        raise DegenerateIterate(i, k)


def cz_index(path: RotationNumbers, k: int = 1) -> int:
    """Conley-Zehnder index ``mu(Phi^k)``.

    Raises :class:`DegenerateIterate` if some ``k*rho_i`` is an even integer.
    """
    _require_nondegenerate(path, k)
    return sum(2 * _floor_half(k * r) + 1 for r in path.rho)


def mean_index(path: RotationNumbers, k: int = 1) -> Fraction:
    return k * sum(path.rho, Fraction(0))


def decompose(path: RotationNumbers, k: int = 1) -> IndexDecomposition:
    """Split ``Phi^k`` into a loop and ``n`` short paths.

    Each ``k*rho_i`` is written as ``2*m_i + lambda_i`` with ``lambda_i`` in
    ``(-1, 1]``; the endpoint ``lambda_i = 1`` only occurs when the block ends
    at eigenvalue ``-1``.
    """
    _require_nondegenerate(path, k)
    loops = []
    angles = []
    for r in path.rho:
        x = k * r
        m = math.ceil((x - 1) / 2)
        loops.append(m)
        angles.append(x - 2 * m)
    return IndexDecomposition(tuple(loops), tuple(angles))


def iteration_identity_check(path: RotationNumbers, k: int) -> bool:
    """Whether ``mu(Phi^k) == k*loop(Phi) + mu(xi^k)``.

    Both sides are evaluated independently: the left from ``rho`` directly,
    the right from the decomposition of ``Phi`` itself.
    """
    _require_nondegenerate(path, 1)
    _require_nondegenerate(path, k)
    split = decompose(path, 1)
    lhs = cz_index(path, k)
    rhs = k * split.loop + cz_index(split.short_path(), k)
    return lhs == rhs


def index_defect(path: RotationNumbers, partition: Partition) -> int:
    """``sum_i (floor(k*rho_i/2) - sum_j floor(k_j*rho_i/2))``; never negative."""
    counts = Counter(partition.parts)
    for part in counts:
        _require_nondegenerate(path, part)
    _require_nondegenerate(path, partition.total)
    defect = 0
    for r in path.rho:
        pieces = sum(mult * _floor_half(part * r) for part, mult in counts.items())
        defect += _floor_half(partition.total * r) - pieces
    return defect


def is_extremal(path: RotationNumbers, partition: Partition) -> bool:
    """Check ``sum_j mu(Phi^{k_j}) - mu(Phi^k) == (r-1)*n``."""
    counts = Counter(partition.parts)
    total = sum(mult * cz_index(path, part) for part, mult in counts.items())
    return total - cz_index(path, partition.total) == (partition.length - 1) * path.n


def is_extremal_by_floors(path: RotationNumbers, partition: Partition) -> bool:
    """Coordinatewise criterion ``sum_j floor(k_j*rho_i/2) == floor(k*rho_i/2)``."""
    counts = Counter(partition.parts)
    for part in counts:
        _require_nondegenerate(path, part)
    _require_nondegenerate(path, partition.total)
    for r in path.rho:
        pieces = sum(mult * _floor_half(part * r) for part, mult in counts.items())
        if pieces != _floor_half(partition.total * r):
            return False
    return True


def partitions(k: int, largest: int | None = None) -> Iterator[Partition]:
    """All partitions of ``k`` in reverse lexicographic order."""

    def rec(remaining: int, cap: int) -> Iterator[list[int]]:
        if remaining == 0:
            yield []
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in rec(remaining - first, first):
                yield [first] + rest

    for parts in rec(k, k if largest is None else largest):
        yield Partition(parts)


def index_table(path: RotationNumbers, kmax: int) -> list[tuple[int, int | None, Fraction]]:
    """Rows ``(k, mu(Phi^k) or None if degenerate, mean index)`` for ``k = 1..kmax``."""
    rows = []
    for k in range(1, kmax + 1):
        mu = cz_index(path, k) if path.is_nondegenerate(k) else None
        rows.append((k, mu, mean_index(path, k)))
    return rows


def extremal_census(path: RotationNumbers, kmax: int) -> dict[int, tuple[int, int]]:
    """Map ``k -> (extremal partitions, nondegenerate partitions)`` for ``k <= kmax``.

    Partitions touching a degenerate iterate are left out of both counts.
    """
    census = {}
    for k in range(1, kmax + 1):
        extremal = checked = 0
        if path.is_nondegenerate(k):
            for p in partitions(k):
                if all(path.is_nondegenerate(part) for part in set(p.parts)):
                    checked += 1
                    extremal += is_extremal(path, p)
        census[k] = (extremal, checked)
    return census


def as_rotation_numbers(values: Sequence[RationalLike] | RotationNumbers) -> RotationNumbers:
    if isinstance(values, RotationNumbers):
        return values
    return RotationNumbers(values)

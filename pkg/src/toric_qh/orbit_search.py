"""Bounded search along the torus orbit ``{k * theta mod 2}``.

Coordinates live on ``(R / 2Z)^n`` in half-turn units, represented in
``[-1, 1)``.  The scan is a linear pass over ``k = 1..horizon`` using
integer arithmetic on a common denominator, so every membership decision
is exact.

:func:`find_lemma_iterate` looks for an iterate ``m`` whose short angles
are all positive and small, and whose loop index is ``-2n + d`` with
``2N | d``.  Such an ``m`` makes ``m + ... + m`` (``r`` times) an extremal
partition for every ``r`` with ``r * max(lambda_i) < 2``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import HorizonExceeded
from .index_core import (
    Partition,
    RationalLike,
    RotationNumbers,
    cz_index,
    decompose,
    is_extremal,
    to_fraction,
)

# Initial window for the short angles: eigenvalues in the right half-plane.
DEFAULT_INITIAL_WIDTH = Fraction(1, 2)


def reduce_mod2(x: Fraction) -> Fraction:
    """Representative of ``x`` modulo 2 in ``[-1, 1)``."""
    return x - 2 * math.floor((x + 1) / 2)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[Fraction, ...]

    def __init__(self, coords: Iterable[RationalLike]) -> None:
        values = tuple(reduce_mod2(to_fraction(c)) for c in coords)
        if not values:
            raise ValueError("a torus point needs at least one coordinate")
        object.__setattr__(self, "coords", values)

    @classmethod
    def of(cls, path: RotationNumbers) -> "TorusPoint":
        return cls(path.rho)

    @property
    def n(self) -> int:
        return len(self.coords)

    def times(self, k: int) -> "TorusPoint":
        return TorusPoint(k * c for c in self.coords)


@dataclass(frozen=True)
class Window:
    """Product of open intervals ``(lower_i, upper_i)`` inside ``[-1, 1]``."""

    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __init__(self, bounds: Iterable[tuple[RationalLike, RationalLike]]) -> None:
        values = tuple((to_fraction(a), to_fraction(b)) for a, b in bounds)
        if not values:
            raise ValueError("a window needs at least one interval")
        for a, b in values:
            if not a < b:
                raise ValueError(f"empty interval ({a}, {b})")
            if a < -1 or b > 1:
                raise ValueError(f"interval ({a}, {b}) leaves [-1, 1]")
        object.__setattr__(self, "bounds", values)

    @classmethod
    def cube(cls, lower: RationalLike, upper: RationalLike, n: int) -> "Window":
        return cls([(lower, upper)] * n)

    @property
    def n(self) -> int:
        return len(self.bounds)

    def contains(self, point: TorusPoint) -> bool:
        return all(a < x < b for x, (a, b) in zip(point.coords, self.bounds))


def _scaled(theta: TorusPoint, window: Window) -> tuple[int, list[int], list[tuple[int, int]]]:
    # Integer form: coordinate i is x_i / den with x_i in [-den, den).
    # a < x/den < b  <=>  floor(a*den) < x < ceil(b*den) for integer x.
    den = math.lcm(*(c.denominator for c in theta.coords))
    steps = [int(c * den) for c in theta.coords]
    limits = [(math.floor(a * den), math.ceil(b * den)) for a, b in window.bounds]
    return den, steps, limits


def _scan(den: int, steps: Sequence[int], limits: Sequence[tuple[int, int]],
          start: int, stop: int) -> list[int]:
    period = 2 * den
    pos = [((start - 1) * s + den) % period - den for s in steps]
    hits = []
    for k in range(start, stop + 1):
        inside = True
        for i, s in enumerate(steps):
            x = pos[i] + s
            if x >= den:
                x -= period
            elif x < -den:
                x += period
            pos[i] = x
            lo, hi = limits[i]
            if not lo < x < hi:
                inside = False
        if inside:
            hits.append(k)
    return hits


def iter_orbit_hits(theta: TorusPoint, window: Window, horizon: int,
                    start: int = 1) -> Iterator[int]:
    """Lazily yield ``k`` in ``[start, horizon]`` with ``k*theta mod 2`` in ``window``."""
    if theta.n != window.n:
        raise ValueError("window and point have different dimensions")
    den, steps, limits = _scaled(theta, window)
    block = 4096
    k = start
    while k <= horizon:
        stop = min(horizon, k + block - 1)
        yield from _scan(den, steps, limits, k, stop)
        k = stop + 1


def orbit_hits(theta: TorusPoint, window: Window, horizon: int,
               workers: int | None = None) -> list[int]:
    """All ``k <= horizon`` whose orbit point lies in ``window``, increasing.

    With ``workers > 1`` the range is cut into contiguous chunks scanned in
    separate processes; the merged result does not depend on scheduling.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if theta.n != window.n:
        raise ValueError("window and point have different dimensions")
    if not workers or workers <= 1 or horizon < 10_000:
        return list(iter_orbit_hits(theta, window, horizon))
    den, steps, limits = _scaled(theta, window)
    size = -(-horizon // workers)
    ranges = [(lo, min(horizon, lo + size - 1)) for lo in range(1, horizon + 1, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_scan, den, steps, limits, lo, hi) for lo, hi in ranges]
        chunks = [f.result() for f in futures]
    return sorted(k for chunk in chunks for k in chunk)


@dataclass(frozen=True)
class LemmaWitness:
    m: int
    d: int
    loop: int
    mu_m: int
    lambdas: tuple[Fraction, ...]
    r_max: int
    width: Fraction
    certified_partitions: tuple[tuple[int, bool], ...]

    @property
    def all_certified(self) -> bool:
        return all(ok for _, ok in self.certified_partitions)


def max_repetitions(lambdas: Sequence[Fraction]) -> int:
    """Largest ``r`` with ``r * max|lambda_i| < 2``."""
    top = max(abs(x) for x in lambdas)
    if top == 0:
        raise ValueError("short angles must be nonzero")
    q = 2 / top
    return math.ceil(q) - 1


def certify_lemma_arithmetic(n: int, d: int, r: int) -> bool:
    """Integer identity ``r(-n+d) - (r-1)n == r(-2n+d) + n``."""
    return r * (-n + d) - (r - 1) * n == r * (-2 * n + d) + n


def _witness_at(path: RotationNumbers, N: int, m: int, width: Fraction) -> LemmaWitness | None:
    n = path.n
    split = decompose(path, m)
    if not all(0 < lam < width for lam in split.short_angles):
        return None
    d = split.loop + 2 * n
    if d % (2 * N):
        return None
    r_max = max_repetitions(split.short_angles)
    if r_max < 2:
        return None
    mu_m = cz_index(path, m)
    certified = tuple(
        (r, is_extremal(path, Partition.uniform(m, r))) for r in range(1, r_max + 1)
    )
    return LemmaWitness(
        m=m,
        d=d,
        loop=split.loop,
        mu_m=mu_m,
        lambdas=split.short_angles,
        r_max=r_max,
        width=width,
        certified_partitions=certified,
    )


def _first_witness(path: RotationNumbers, N: int, horizon: int,
                   width: Fraction) -> LemmaWitness | None:
    window = Window.cube(0, width, path.n)
    for m in iter_orbit_hits(TorusPoint.of(path), window, horizon):
        witness = _witness_at(path, N, m, width)
        if witness is not None:
            return witness
    return None


def find_lemma_iterate(path: RotationNumbers, N: int, horizon: int,
                       initial_width: RationalLike = DEFAULT_INITIAL_WIDTH) -> LemmaWitness:
    """Smallest iterate ``m <= horizon`` realizing the lemma construction.

    The short angles must lie in ``(0, w)``.  Starting from
    ``w = initial_width`` the window is halved for as long as some iterate
    within the horizon still qualifies; the witness for the narrowest
    successful window is returned.

    Raises :class:`HorizonExceeded` if not even the initial window is hit.
    """
    n = path.n
    if N < n + 1:
        raise ValueError(f"requires N >= n+1, got N={N}, n={n}")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    width = to_fraction(initial_width)
    if not 0 < width <= 1:
        raise ValueError("initial width must lie in (0, 1]")
    best = None
    while True:
        found = _first_witness(path, N, horizon, width)
        if found is None:
            break
        best = found
        width /= 2
        # Once the found angles are already narrower than the next window,
        # the same m stays the smallest hit, so skip the rescan.
        while max(best.lambdas) < width:
            best = replace(best, width=width)
            width /= 2
    if best is None:
        raise HorizonExceeded(horizon)
    return best

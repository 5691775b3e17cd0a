"""Exact arithmetic in the Novikov field over F_2 and its Laurent extension.

A :class:`NovikovSeries` is a generalized Laurent series ``sum z_theta s^theta``
with coefficients in F_2, exponents in a finitely generated subgroup of the
rationals, and support that is finite above every bound.  Infinite series
are carried to an explicit ``cutoff``: every exponent ``>= cutoff`` is known
exactly, nothing is claimed below it.  ``cutoff=None`` means the stored
support is the whole support.

A :class:`LaurentElement` is a finite sum ``sum_m c_m q^m`` with Novikov
coefficients.  The generator ``q`` carries an integer degree (``2N`` in the
storage convention) and ``s`` has degree zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import CutoffError, DivisionByZero, IncompatiblePeriodGroup
from .index_core import RationalLike, format_rational, to_fraction


def _rational_gcd(values: Iterable[Fraction]) -> Fraction:
    values = [abs(v) for v in values if v]
    if not values:
        return Fraction(0)
    den = math.lcm(*(v.denominator for v in values))
    num = math.gcd(*(int(v * den) for v in values))
    return Fraction(num, den)


@dataclass(frozen=True)
class PeriodGroup:
    """Subgroup of Q generated by finitely many positive rationals.

    Such a group is cyclic; ``step`` is its positive generator (0 for the
    trivial group).  Two groups compare equal when they generate the same
    subgroup.
    """

    generators: tuple[Fraction, ...]

    def __init__(self, generators: Iterable[RationalLike] = ()) -> None:
        values = tuple(to_fraction(g) for g in generators)
        if any(g <= 0 for g in values):
            raise ValueError("period generators must be positive")
        object.__setattr__(self, "generators", values)

    @property
    def step(self) -> Fraction:
        return _rational_gcd(self.generators)

    def contains(self, theta: Fraction) -> bool:
        step = self.step
        if step == 0:
            return theta == 0
        return (theta / step).denominator == 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PeriodGroup):
            return NotImplemented
        return self.step == other.step

    def __hash__(self) -> int:
        return hash(self.step)

    def to_text(self) -> str:
        return ",".join(format_rational(g) for g in self.generators)

    @classmethod
    def parse(cls, text: str) -> "PeriodGroup":
        return cls(part for part in text.split(",") if part.strip())


def _check_group(a: "NovikovSeries", b: "NovikovSeries") -> None:
    if a.gamma != b.gamma:
        raise IncompatiblePeriodGroup(
            f"period groups <{a.gamma.to_text()}> and <{b.gamma.to_text()}> differ"
        )


def _max_cutoff(*cutoffs: Fraction | None) -> Fraction | None:
    known = [c for c in cutoffs if c is not None]
    return max(known) if known else None


def _convolve(a: Iterable[Fraction], b: Iterable[Fraction],
              floor: Fraction | None = None) -> frozenset[Fraction]:
    out: set[Fraction] = set()
    b = list(b)
    for x in a:
        for y in b:
            e = x + y
            if floor is not None and e < floor:
                continue
            # characteristic 2: coincident exponents cancel
            if e in out:
                out.remove(e)
            else:
                out.add(e)
    return frozenset(out)


class NovikovSeries:
    __slots__ = ("exponents", "gamma", "cutoff")

    def __init__(self, exponents: Iterable[RationalLike], gamma: PeriodGroup,
                 cutoff: RationalLike | None = None) -> None:
        cut = None if cutoff is None else to_fraction(cutoff)
        support: set[Fraction] = set()
        for e in exponents:
            e = to_fraction(e)
            if e in support:
                support.remove(e)
            else:
                support.add(e)
        for e in support:
            if not gamma.contains(e):
                raise IncompatiblePeriodGroup(f"exponent {e} is not in <{gamma.to_text()}>")
        if cut is not None:
            support = {e for e in support if e >= cut}
        self.exponents = frozenset(support)
        self.gamma = gamma
        self.cutoff = cut

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, gamma: PeriodGroup) -> "NovikovSeries":
        return cls((), gamma)

    @classmethod
    def one(cls, gamma: PeriodGroup) -> "NovikovSeries":
        return cls((0,), gamma)

    @classmethod
    def monomial(cls, theta: RationalLike, gamma: PeriodGroup) -> "NovikovSeries":
        return cls((theta,), gamma)

    # -- inspection ---------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.cutoff is None

    @property
    def leading(self) -> Fraction | None:
        """Largest exponent with nonzero coefficient, ``None`` if none is known."""
        return max(self.exponents) if self.exponents else None

    def is_zero(self) -> bool:
        """True only for the exact zero series."""
        return self.is_exact and not self.exponents

    def is_monomial(self) -> bool:
        return self.is_exact and len(self.exponents) == 1

    def sorted_exponents(self) -> list[Fraction]:
        return sorted(self.exponents, reverse=True)

    def coefficient(self, theta: RationalLike) -> int:
        theta = to_fraction(theta)
        if self.cutoff is not None and theta < self.cutoff:
            raise CutoffError(f"coefficient of s^{theta} lies below cutoff {self.cutoff}")
        return int(theta in self.exponents)

    def truncate(self, cutoff: RationalLike) -> "NovikovSeries":
        """Forget everything below ``cutoff`` (never refines precision)."""
        cut = _max_cutoff(self.cutoff, to_fraction(cutoff))
        return NovikovSeries(self.exponents, self.gamma, cut)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: "NovikovSeries") -> "NovikovSeries":
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        _check_group(self, other)
        cut = _max_cutoff(self.cutoff, other.cutoff)
        return NovikovSeries(self.exponents ^ other.exponents, self.gamma, cut)

    __sub__ = __add__

    def _lead_bound(self) -> Fraction:
        # upper bound on the true leading exponent of an inexact series
        if self.exponents:
            return max(self.exponents)
        assert self.cutoff is not None
        return self.cutoff

    def product_cutoff(self, other: "NovikovSeries") -> Fraction | None:
        """Sharpest cutoff that can be guaranteed for ``self * other``."""
        if self.is_zero() or other.is_zero():
            return None
        bounds = []
        if self.cutoff is not None:
            bounds.append(self.cutoff + other._lead_bound())
        if other.cutoff is not None:
            bounds.append(other.cutoff + self._lead_bound())
        return max(bounds) if bounds else None

    def __mul__(self, other: "NovikovSeries") -> "NovikovSeries":
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        _check_group(self, other)
        cut = self.product_cutoff(other)
        return NovikovSeries(_convolve(self.exponents, other.exponents, cut), self.gamma, cut)

    def shift(self, theta: RationalLike) -> "NovikovSeries":
        """Multiply by ``s^theta``."""
        theta = to_fraction(theta)
        cut = None if self.cutoff is None else self.cutoff + theta
        return NovikovSeries((e + theta for e in self.exponents), self.gamma, cut)

    def invert(self, cutoff: RationalLike) -> "NovikovSeries":
        """Inverse ``b`` with ``self * b`` equal to 1 at every exponent ``>= cutoff``.

        The leading monomial ``s^theta0`` is factored out and the geometric
        series of the remainder is summed until its terms fall below the
        requested precision.  Monomials invert exactly.
        """
        if not self.exponents:
            raise DivisionByZero("cannot invert a series with no known nonzero term")
        theta0 = max(self.exponents)
        target = to_fraction(cutoff) - theta0
        if self.cutoff is not None:
            # the unknown tail of self limits how far the inverse is determined
            target = max(target, self.cutoff - 2 * theta0)
        rest = frozenset(e - theta0 for e in self.exponents if e != theta0)
        if not rest and self.is_exact:
            return NovikovSeries((-theta0,), self.gamma)
        floor = target + theta0
        total = {Fraction(0)}
        power = frozenset({Fraction(0)})
        while True:
            power = _convolve(power, rest, floor)
            if not power:
                break
            total ^= power
        return NovikovSeries((e - theta0 for e in total), self.gamma, target)

    # -- comparison ---------------------------------------------------
    def agrees_with(self, other: "NovikovSeries", cutoff: RationalLike | None = None) -> bool:
        """Compare coefficients at every exponent ``>= cutoff``.

        Raises :class:`CutoffError` if either side is not known that far down.
        """
        _check_group(self, other)
        floor = _max_cutoff(self.cutoff, other.cutoff)
        if cutoff is None:
            cutoff = floor
        else:
            cutoff = to_fraction(cutoff)
            if floor is not None and cutoff < floor:
                raise CutoffError(f"requested comparison at {cutoff} below known cutoff {floor}")
        a = self.exponents if cutoff is None else {e for e in self.exponents if e >= cutoff}
        b = other.exponents if cutoff is None else {e for e in other.exponents if e >= cutoff}
        return a == b

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        if self.gamma != other.gamma:
            return False
        return self.agrees_with(other)

    __hash__ = None  # equality depends on precision

    # -- rendering ----------------------------------------------------
    def to_text(self) -> str:
        terms = []
        for e in self.sorted_exponents():
            terms.append("1" if e == 0 else f"s^{format_rational(e)}")
        if self.cutoff is not None:
            terms.append(f"O(s^<{format_rational(self.cutoff)})")
        return " + ".join(terms) if terms else "0"

    def to_token(self) -> str:
        """Machine form ``e1,e2,...@cutoff`` (exponents decreasing, ``@exact`` when finite)."""
        exps = ",".join(format_rational(e) for e in self.sorted_exponents())
        tail = "exact" if self.cutoff is None else format_rational(self.cutoff)
        return f"{exps}@{tail}"

    @classmethod
    def from_token(cls, token: str, gamma: PeriodGroup) -> "NovikovSeries":
        body, sep, tail = token.strip().partition("@")
        if not sep:
            raise ValueError(f"malformed series token {token!r}")
        exps = [e for e in body.split(",") if e]
        cut = None if tail == "exact" else to_fraction(tail)
        return cls(exps, gamma, cut)

    def __repr__(self) -> str:
        return f"NovikovSeries({self.to_text()})"


def add(a: NovikovSeries, b: NovikovSeries) -> NovikovSeries:
    return a + b


def mul(a: NovikovSeries, b: NovikovSeries) -> NovikovSeries:
    return a * b


def invert(a: NovikovSeries, cutoff: RationalLike) -> NovikovSeries:
    return a.invert(cutoff)


class NonHomogeneous:
    """Marker returned by :func:`degree` for elements mixing several degrees."""

    _instance = None

    def __new__(cls) -> "NonHomogeneous":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NON_HOMOGENEOUS"


NON_HOMOGENEOUS = NonHomogeneous()


class LaurentElement:
    """Element of ``K[q, q^-1]`` with ``deg q = q_degree`` and ``deg s = 0``.

    ``variable`` is only a display name (``"q"`` in the storage convention,
    ``"q'"`` after renaming).
    """

    __slots__ = ("coeffs", "gamma", "q_degree", "variable")

    def __init__(self, coeffs: Mapping[int, NovikovSeries], gamma: PeriodGroup,
                 q_degree: int, variable: str = "q") -> None:
        clean = {}
        for m, c in coeffs.items():
            if c.gamma != gamma:
                raise IncompatiblePeriodGroup("coefficient over a different period group")
            if not c.is_zero():
                clean[int(m)] = c
        self.coeffs = clean
        self.gamma = gamma
        self.q_degree = int(q_degree)
        self.variable = variable

    @classmethod
    def zero(cls, gamma: PeriodGroup, q_degree: int, variable: str = "q") -> "LaurentElement":
        return cls({}, gamma, q_degree, variable)

    @classmethod
    def constant(cls, c: NovikovSeries, q_degree: int, variable: str = "q") -> "LaurentElement":
        return cls({0: c}, c.gamma, q_degree, variable)

    @classmethod
    def one(cls, gamma: PeriodGroup, q_degree: int, variable: str = "q") -> "LaurentElement":
        return cls({0: NovikovSeries.one(gamma)}, gamma, q_degree, variable)

    @classmethod
    def monomial(cls, theta: RationalLike, m: int, gamma: PeriodGroup, q_degree: int,
                 variable: str = "q") -> "LaurentElement":
        """``s^theta q^m``."""
        return cls({m: NovikovSeries.monomial(theta, gamma)}, gamma, q_degree, variable)

    def _compatible(self, other: "LaurentElement") -> None:
        if self.gamma != other.gamma:
            raise IncompatiblePeriodGroup("Laurent elements over different period groups")
        if self.q_degree != other.q_degree or self.variable != other.variable:
            raise ValueError("Laurent elements use different generator conventions")

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "LaurentElement") -> "LaurentElement":
        self._compatible(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return LaurentElement(out, self.gamma, self.q_degree, self.variable)

    __sub__ = __add__

    def __mul__(self, other: "LaurentElement") -> "LaurentElement":
        self._compatible(other)
        out: dict[int, NovikovSeries] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                term = c1 * c2
                m = m1 + m2
                out[m] = out[m] + term if m in out else term
        return LaurentElement(out, self.gamma, self.q_degree, self.variable)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentElement):
            return NotImplemented
        if self.gamma != other.gamma or self.q_degree != other.q_degree:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        zero = NovikovSeries.zero(self.gamma)
        return all(self.coeffs.get(m, zero) == other.coeffs.get(m, zero) for m in keys)

    __hash__ = None

    def is_unit(self) -> bool:
        """Units of ``K[q, q^-1]`` are single powers of ``q`` with a nonzero coefficient."""
        if len(self.coeffs) != 1:
            return False
        (c,) = self.coeffs.values()
        return bool(c.exponents)

    def inverse(self, cutoff: RationalLike) -> "LaurentElement":
        if not self.is_unit():
            raise DivisionByZero("only c*q^m with c != 0 is invertible")
        ((m, c),) = self.coeffs.items()
        return LaurentElement({-m: c.invert(cutoff)}, self.gamma, self.q_degree, self.variable)

    def rename(self, omega0: RationalLike, variable: str | None = None) -> "LaurentElement":
        """Rewrite in the generator ``q' = s^(-omega0) q^(-1)``.

        The substitution is an involution: ``q = s^(-omega0) q'^(-1)`` as well,
        so applying it twice returns the original element.
        """
        omega0 = to_fraction(omega0)
        if variable is None:
            variable = "q'" if self.variable == "q" else "q"
        out = {-m: c.shift(-m * omega0) for m, c in self.coeffs.items()}
        return LaurentElement(out, self.gamma, -self.q_degree, variable)

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for m in sorted(self.coeffs, reverse=True):
            c = self.coeffs[m].to_text()
            if " + " in c:
                c = f"({c})"
            if m == 0:
                parts.append(c)
            else:
                qpart = self.variable if m == 1 else f"{self.variable}^{m}"
                parts.append(qpart if c == "1" else f"{c} {qpart}")
        return " + ".join(parts)

    def to_token(self) -> str:
        """Machine form ``m:series;m:series`` with q-powers decreasing (``zero`` for 0)."""
        if not self.coeffs:
            return "zero"
        return ";".join(f"{m}:{self.coeffs[m].to_token()}" for m in sorted(self.coeffs, reverse=True))

    @classmethod
    def from_token(cls, token: str, gamma: PeriodGroup, q_degree: int,
                   variable: str = "q") -> "LaurentElement":
        token = token.strip()
        if token == "zero":
            return cls.zero(gamma, q_degree, variable)
        coeffs = {}
        for item in token.split(";"):
            m, _, series = item.partition(":")
            coeffs[int(m)] = NovikovSeries.from_token(series, gamma)
        return cls(coeffs, gamma, q_degree, variable)

    def __repr__(self) -> str:
        return f"LaurentElement({self.to_text()})"


def degree(x: LaurentElement) -> int | NonHomogeneous | None:
    """Common degree ``q_degree * m`` of all terms.

    Returns ``None`` for zero (homogeneous of every degree) and
    :data:`NON_HOMOGENEOUS` if the terms disagree.
    """
    degrees = {x.q_degree * m for m in x.coeffs}
    if not degrees:
        return None
    if len(degrees) > 1:
        return NON_HOMOGENEOUS
    return degrees.pop()

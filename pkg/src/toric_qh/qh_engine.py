"""Finite-basis graded quantum homology rings and the degree arguments run on them.

Classes are homology degrees in ``0..2n``; the quantum product of classes of
degree ``k`` and ``l`` has degree ``k + l - 2n``.  Structure constants are
stored in the storage convention: ``deg s = 0``, ``deg q = 2N``, and a
sphere class ``A`` contributes ``s^(-omega(A)) q^(-c_1(A)/N)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import MalformedBetti, ParityViolation, SpecMismatch
from .index_core import RationalLike, format_rational, to_fraction
from .novikov import (
    NON_HOMOGENEOUS,
    LaurentElement,
    PeriodGroup,
    degree,
)

Constants = Mapping[tuple[int, int], Mapping[int, LaurentElement]]


@dataclass(frozen=True, eq=False)
class RingSpec:
    n: int
    N: int
    gamma: PeriodGroup
    basis: tuple[tuple[str, int], ...]
    constants: Constants
    fundamental: int
    point: int
    omega0: Fraction = Fraction(1)
    name: str = ""

    def __post_init__(self) -> None:
        if self.n < 1 or self.N < 1:
            raise ValueError("n and N must be positive")
        for label, deg in self.basis:
            if not 0 <= deg <= 2 * self.n:
                raise ValueError(f"class {label} has degree {deg} outside [0, {2 * self.n}]")
        size = len(self.basis)
        if not (0 <= self.fundamental < size and 0 <= self.point < size):
            raise ValueError("designated classes are not basis indices")
        if self.basis[self.fundamental][1] != 2 * self.n or self.basis[self.point][1] != 0:
            raise ValueError("[M] must have degree 2n and [pt] degree 0")
        for (i, j), entry in self.constants.items():
            expected = self.basis[i][1] + self.basis[j][1] - 2 * self.n
            for k, coeff in entry.items():
                if coeff.q_degree != self.q_degree:
                    raise ValueError(f"structure constant ({i},{j})->{k} uses the wrong q-degree")
                d = degree(coeff)
                if d is None:
                    continue
                if d is NON_HOMOGENEOUS or self.basis[k][1] + d != expected:
                    raise ValueError(
                        f"structure constant ({i},{j})->{k} breaks deg(a*b) = deg a + deg b - 2n"
                    )
        for j in range(size):
            for pair in ((self.fundamental, j), (j, self.fundamental)):
                entry = {k: c for k, c in self.constants.get(pair, {}).items() if not c.is_zero()}
                if set(entry) != {j} or entry[j] != self.one():
                    raise ValueError(f"[M] is not a unit for class {self.basis[j][0]}")

    @property
    def q_degree(self) -> int:
        return 2 * self.N

    @property
    def size(self) -> int:
        return len(self.basis)

    def one(self) -> LaurentElement:
        return LaurentElement.one(self.gamma, self.q_degree)

    def index_of(self, label: str) -> int:
        for i, (name, _) in enumerate(self.basis):
            if name == label:
                return i
        raise KeyError(label)

    def basis_class(self, i: int | str, coeff: LaurentElement | None = None) -> "GradedClass":
        if isinstance(i, str):
            i = self.index_of(i)
        return GradedClass(self, {i: self.one() if coeff is None else coeff})

    def zero_class(self) -> "GradedClass":
        return GradedClass(self, {})

    def fundamental_class(self) -> "GradedClass":
        return self.basis_class(self.fundamental)

    def point_class(self) -> "GradedClass":
        return self.basis_class(self.point)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingSpec):
            return NotImplemented
        return dumps_spec(self) == dumps_spec(other)

    __hash__ = object.__hash__


@dataclass(eq=False)
class GradedClass:
    spec: RingSpec
    components: dict[int, LaurentElement] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.components = {i: c for i, c in self.components.items() if not c.is_zero()}

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other: "GradedClass") -> "GradedClass":
        _same_spec(self.spec, other.spec)
        out = dict(self.components)
        for i, c in other.components.items():
            out[i] = out[i] + c if i in out else c
        return GradedClass(self.spec, out)

    def scale(self, coeff: LaurentElement) -> "GradedClass":
        return GradedClass(self.spec, {i: c * coeff for i, c in self.components.items()})

    def __mul__(self, other: "GradedClass") -> "GradedClass":
        return product(self.spec, self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedClass):
            return NotImplemented
        if self.spec is not other.spec and self.spec != other.spec:
            return False
        keys = set(self.components) | set(other.components)
        zero = LaurentElement.zero(self.spec.gamma, self.spec.q_degree)
        return all(self.components.get(i, zero) == other.components.get(i, zero) for i in keys)

    __hash__ = None

    def degree(self) -> int | None:
        """Total degree, ``None`` for zero; raises if the class is not homogeneous."""
        degrees = set()
        for i, c in self.components.items():
            d = degree(c)
            if d is NON_HOMOGENEOUS:
                raise ValueError("class is not homogeneous")
            degrees.add(self.spec.basis[i][1] + d)
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ValueError("class is not homogeneous")
        return degrees.pop()

    def only_component(self, i: int) -> LaurentElement | None:
        """Coefficient of basis class ``i`` if the class is a multiple of it, else ``None``."""
        if set(self.components) != {i}:
            return None
        return self.components[i]

    def to_text(self, renamed: bool = False) -> str:
        if not self.components:
            return "0"
        parts = []
        for i in sorted(self.components):
            c = self.components[i]
            if renamed:
                c = c.rename(self.spec.omega0)
            label = self.spec.basis[i][0]
            text = c.to_text()
            if text == "1":
                parts.append(label)
            else:
                parts.append(f"({text}) {label}" if " + " in text else f"{text} {label}")
        return " + ".join(parts)

    def to_token(self) -> str:
        if not self.components:
            return "zero"
        return "|".join(f"{i}={self.components[i].to_token()}" for i in sorted(self.components))


def _same_spec(a: RingSpec, b: RingSpec) -> None:
    if a is not b and a != b:
        raise SpecMismatch("classes belong to different ring specifications")


def cp_n_spec(n: int, omega0: RationalLike = 1) -> RingSpec:
    """Quantum homology of ``CP^n``: basis ``u^0 = [M], ..., u^n = [pt]``.

    ``u^a * u^b = u^(a+b)`` for ``a + b <= n`` and
    ``s^(-omega0) q^(-1) u^(a+b-n-1)`` otherwise; the coefficient of the
    quantum correction is 1.
    """
    if n < 1:
        raise ValueError("n must be positive")
    omega0 = to_fraction(omega0)
    N = n + 1
    gamma = PeriodGroup([omega0])
    qdeg = 2 * N
    one = LaurentElement.one(gamma, qdeg)
    line = LaurentElement.monomial(-omega0, -1, gamma, qdeg)

    def label(i: int) -> str:
        if i == 0:
            return "[M]"
        if i == n:
            return "[pt]"
        return "u" if i == 1 else f"u^{i}"

    basis = tuple((label(i), 2 * n - 2 * i) for i in range(n + 1))
    constants = {}
    for a in range(n + 1):
        for b in range(n + 1):
            if a + b <= n:
                constants[(a, b)] = {a + b: one}
            else:
                constants[(a, b)] = {a + b - n - 1: line}
    return RingSpec(n=n, N=N, gamma=gamma, basis=basis, constants=constants,
                    fundamental=0, point=n, omega0=omega0, name=f"CP^{n}")


def product(spec: RingSpec, x: GradedClass, y: GradedClass) -> GradedClass:
    """Quantum product, extended bilinearly from the structure constants."""
    _same_spec(spec, x.spec)
    _same_spec(spec, y.spec)
    out: dict[int, LaurentElement] = {}
    for i, a in x.components.items():
        for j, b in y.components.items():
            ab = a * b
            for k, c in spec.constants.get((i, j), {}).items():
                term = ab * c
                out[k] = out[k] + term if k in out else term
    return GradedClass(spec, out)


def power(spec: RingSpec, x: GradedClass, r: int) -> GradedClass:
    if r < 1:
        raise ValueError("power needs r >= 1")
    _same_spec(spec, x.spec)
    result = None
    base = x
    while r:
        if r & 1:
            result = base if result is None else product(spec, result, base)
        r >>= 1
        if r:
            base = product(spec, base, base)
    return result


@dataclass(frozen=True)
class PointIdentityReport:
    holds: bool
    alpha: LaurentElement | None
    alpha_invertible: bool
    alpha_degree: int | None
    expected_degree: int
    point_power: GradedClass

    def alpha_renamed(self, omega0: RationalLike) -> LaurentElement | None:
        return None if self.alpha is None else self.alpha.rename(omega0)


def verify_point_identity(spec: RingSpec) -> PointIdentityReport:
    """Check ``[pt]^N = [M] alpha`` with ``alpha`` a unit of degree ``-2Nn``."""
    p = power(spec, spec.point_class(), spec.N)
    alpha = p.only_component(spec.fundamental)
    expected = -2 * spec.N * spec.n
    if alpha is None:
        return PointIdentityReport(False, None, False, None, expected, p)
    d = degree(alpha)
    d = None if d is NON_HOMOGENEOUS else d
    invertible = alpha.is_unit()
    holds = invertible and d == expected
    return PointIdentityReport(holds, alpha, invertible, d, expected, p)


def orbit_class_degree(n: int, N: int, mu: int) -> int:
    """Residue ``(n + mu) mod 2N`` of the degree of the orbit class."""
    if (mu - n) % 2:
        raise ParityViolation(f"index {mu} has the wrong parity for n={n}")
    return (n + mu) % (2 * N)


def slot_classes(spec: RingSpec, residue: int) -> list[int]:
    """Basis classes whose degree is congruent to ``residue`` mod ``2N``."""
    mod = spec.q_degree
    return [i for i, (_, deg) in enumerate(spec.basis) if (deg - residue) % mod == 0]


@dataclass(frozen=True)
class TheoremVerdict:
    status: str  # "consistent" or "contradiction"
    reason: str
    forced: tuple[tuple[int, int], ...] = ()
    violations: tuple[tuple[int, int], ...] = ()
    ambiguous: tuple[int, ...] = ()
    conclusion: str = ""
    notes: tuple[str, ...] = ()

    @property
    def consistent(self) -> bool:
        return self.status == "consistent"


def _slot_dimension(betti: Sequence[int], n: int, N: int, deg: int) -> int:
    # K-dimension of QH_deg = sum of even Betti numbers in degrees congruent mod 2N
    return sum(betti[j] for j in range(0, 2 * n + 1, 2) if (j - deg) % (2 * N) == 0)


def product_degree(n: int, *degrees: int) -> int:
    """Degree of a quantum product of classes of the given degrees."""
    return sum(degrees) - 2 * n * (len(degrees) - 1)


def replay_theorem(n: int, N: int, betti: Sequence[int]) -> TheoremVerdict:
    """Run the degree bookkeeping that pins down the Betti numbers.

    Inputs are taken as hypotheses: ``[pt]`` is invertible and some nonzero
    ``u`` in ``H_{2n-2}`` has all quantum powers nonzero.
    """
    betti = [int(b) for b in betti]
    if len(betti) != 2 * n + 1:
        raise MalformedBetti(f"expected {2 * n + 1} Betti numbers, got {len(betti)}")
    if any(b < 0 for b in betti):
        raise MalformedBetti("Betti numbers must be nonnegative")
    if betti[0] != 1 or betti[2 * n] != 1:
        raise MalformedBetti("need b_0 = b_2n = 1 for a closed connected manifold")
    if N < n + 1:
        raise ValueError(f"the argument needs N >= n+1, got N={N}, n={n}")

    notes = []
    odd = [(j, betti[j]) for j in range(1, 2 * n + 1, 2) if betti[j]]
    if odd:
        notes.append("odd Betti numbers ignored: " + ",".join(f"b{j}={b}" for j, b in odd))

    u_deg = 2 * n - 2
    if betti[u_deg] == 0:
        return TheoremVerdict("contradiction", f"no nonzero class u in H_{u_deg}",
                              notes=tuple(notes))

    # [pt]*[u] is nonzero (the point class is invertible) and has degree -2.
    pu_deg = product_degree(n, 0, u_deg)
    if N > n + 1:
        if _slot_dimension(betti, n, N, pu_deg) == 0:
            return TheoremVerdict(
                "contradiction",
                f"N > n+1: [pt]*u has degree {pu_deg}, which has no nonzero slot mod {2 * N}",
                notes=tuple(notes),
            )

    forced = []
    violations = []
    ambiguous = []
    for i in range(1, n + 1):
        deg = 2 * n - 2 * i
        target = product_degree(n, *([0] * i), deg)  # [pt]^i * beta
        dim = _slot_dimension(betti, n, N, target)
        if dim != 1:
            ambiguous.append(deg)
            continue
        forced.append((deg, 1))
        if betti[deg] != 1:
            violations.append((deg, betti[deg]))

    if violations:
        where = ", ".join(f"degree {d} (given {b})" for d, b in violations)
        return TheoremVerdict("contradiction", f"dimension forced to 1 at {where}",
                              tuple(forced), tuple(violations), tuple(ambiguous),
                              notes=tuple(notes))
    if ambiguous:
        notes.append("target slot not one-dimensional at degrees " + ",".join(map(str, ambiguous)))
    top = product_degree(n, *([u_deg] * (n + 1)))
    notes.append(f"deg u^{n + 1} = {top} = deg q'[M]; coefficient 1 taken from CP^{n}")
    if n >= 2:
        notes.append("dim H_2 = 1, so M is monotone")
    return TheoremVerdict("consistent", "all even Betti numbers forced to 1",
                          tuple(forced), (), tuple(ambiguous),
                          conclusion=f"QH(M) = QH(CP^{n})", notes=tuple(notes))


def cp_n_betti(n: int) -> tuple[int, ...]:
    return tuple(1 if j % 2 == 0 else 0 for j in range(2 * n + 1))


# -- text serialization ---------------------------------------------------

def dumps_spec(spec: RingSpec) -> str:
    lines = [
        f"name={spec.name}",
        f"n={spec.n}",
        f"N={spec.N}",
        f"gamma={spec.gamma.to_text()}",
        f"omega0={format_rational(spec.omega0)}",
        f"fundamental={spec.fundamental}",
        f"point={spec.point}",
    ]
    for label, deg in spec.basis:
        lines.append(f"class={label}:{deg}")
    for (i, j) in sorted(spec.constants):
        for k in sorted(spec.constants[(i, j)]):
            coeff = spec.constants[(i, j)][k]
            if not coeff.is_zero():
                lines.append(f"product={i},{j},{k},{coeff.to_token()}")
    return "\n".join(lines) + "\n"


def loads_spec(text: str) -> RingSpec:
    fields: dict[str, str] = {}
    basis = []
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed line {raw!r}")
        if key == "class":
            label, _, deg = value.rpartition(":")
            basis.append((label, int(deg)))
        elif key == "product":
            rows.append(value)
        else:
            fields[key] = value
    n, N = int(fields["n"]), int(fields["N"])
    gamma = PeriodGroup.parse(fields["gamma"])
    constants: dict[tuple[int, int], dict[int, LaurentElement]] = {}
    for row in rows:
        i, j, k, token = row.split(",", 3)
        coeff = LaurentElement.from_token(token, gamma, 2 * N)
        constants.setdefault((int(i), int(j)), {})[int(k)] = coeff
    return RingSpec(
        n=n, N=N, gamma=gamma, basis=tuple(basis), constants=constants,
        fundamental=int(fields["fundamental"]), point=int(fields["point"]),
        omega0=to_fraction(fields.get("omega0", "1")), name=fields.get("name", ""),
    )

from fractions import Fraction
from itertools import product as cartesian

import pytest

from oracles import cp_power_of_u
from toric_qh.errors import MalformedBetti, ParityViolation, SpecMismatch
from toric_qh.novikov import LaurentElement, PeriodGroup, degree
from toric_qh.qh_engine import (
    GradedClass,
    RingSpec,
    cp_n_betti,
    cp_n_spec,
    dumps_spec,
    loads_spec,
    orbit_class_degree,
    power,
    product,
    replay_theorem,
    slot_classes,
    verify_point_identity,
)

F = Fraction


def qprime_class(spec, q_power, index):
    """``q'^a u^index`` expressed in storage form ``s^(-a w) q^(-a)``."""
    coeff = LaurentElement.monomial(-q_power * spec.omega0, -q_power, spec.gamma, spec.q_degree)
    return spec.basis_class(index, coeff)


def trivial_product_spec(n):
    """Basis of CP^n with every product not involving [M] set to zero."""
    base = cp_n_spec(n)
    const = {}
    for (i, j), entry in base.constants.items():
        if i == 0 or j == 0:
            const[(i, j)] = entry
    return RingSpec(n=n, N=n + 1, gamma=base.gamma, basis=base.basis, constants=const,
                    fundamental=0, point=n, name="zeroed")


def test_cp1_basis_and_relation():
    spec = cp_n_spec(1)
    assert [label for label, _ in spec.basis] == ["[M]", "[pt]"]
    pt = spec.point_class()
    assert product(spec, pt, pt) == qprime_class(spec, 1, 0)


def test_cp2_products():
    spec = cp_n_spec(2)
    u, pt = spec.basis_class("u"), spec.point_class()
    assert product(spec, u, u) == pt
    assert product(spec, u, pt) == qprime_class(spec, 1, 0)
    square = product(spec, pt, pt)
    assert square == qprime_class(spec, 1, 1)
    assert square.degree() == 0 + 0 - 4 == -6 + 2
    assert square.to_text(renamed=True) == "q' u"


def test_cp_powers():
    spec2, spec3 = cp_n_spec(2), cp_n_spec(3)
    assert power(spec2, spec2.point_class(), 3) == qprime_class(spec2, 2, 0)
    assert power(spec3, spec3.point_class(), 4) == qprime_class(spec3, 3, 0)
    for spec in (spec2, spec3):
        assert power(spec, spec.fundamental_class(), 7) == spec.fundamental_class()
        assert power(spec, spec.point_class(), 1) == spec.point_class()


@pytest.mark.parametrize("n", range(1, 6))
def test_unit_associativity_and_closed_form(n):
    spec = cp_n_spec(n)
    basis = [spec.basis_class(i) for i in range(n + 1)]
    one = spec.fundamental_class()
    for i, x in enumerate(basis):
        assert product(spec, one, x) == x == product(spec, x, one)
        for j, y in enumerate(basis):
            xy = product(spec, x, y)
            assert xy == qprime_class(spec, *cp_power_of_u(n, i + j))
            assert xy.degree() == spec.basis[i][1] + spec.basis[j][1] - 2 * n
    for x, y, z in cartesian(basis, repeat=3):
        assert product(spec, product(spec, x, y), z) == product(spec, x, product(spec, y, z))


@pytest.mark.parametrize("n", range(1, 5))
def test_point_powers_nonzero_and_closed_form(n):
    spec = cp_n_spec(n)
    for r in range(1, 4 * n + 1):
        p = power(spec, spec.point_class(), r)
        assert not p.is_zero()
        assert p == qprime_class(spec, *cp_power_of_u(n, n * r))


def test_sums_and_spec_mismatch():
    spec = cp_n_spec(2)
    u, pt = spec.basis_class("u"), spec.point_class()
    x = u + pt
    assert product(spec, x, x) == pt + qprime_class(spec, 1, 1)  # 2*u*pt vanishes mod 2
    with pytest.raises(SpecMismatch):
        product(spec, u, cp_n_spec(3).basis_class("u"))


def test_ring_spec_validation():
    base = cp_n_spec(2)
    bad = dict(base.constants)
    bad[(1, 1)] = {1: base.one()}  # u*u landing in degree 2 breaks the grading
    with pytest.raises(ValueError):
        RingSpec(n=2, N=3, gamma=base.gamma, basis=base.basis, constants=bad,
                 fundamental=0, point=2)
    no_unit = {k: v for k, v in base.constants.items() if k != (0, 1)}
    with pytest.raises(ValueError):
        RingSpec(n=2, N=3, gamma=base.gamma, basis=base.basis, constants=no_unit,
                 fundamental=0, point=2)


@pytest.mark.parametrize("n", range(1, 7))
def test_point_identity_on_cp_n(n):
    spec = cp_n_spec(n)
    rep = verify_point_identity(spec)
    assert rep.holds and rep.alpha_invertible
    assert rep.alpha_degree == -2 * spec.N * n == -2 * n * (n + 1)
    renamed = rep.alpha_renamed(spec.omega0)
    assert renamed == LaurentElement.monomial(0, n, spec.gamma, -spec.q_degree, "q'")


def test_point_identity_fails_on_zeroed_spec():
    rep = verify_point_identity(trivial_product_spec(2))
    assert not rep.holds and rep.alpha is None and rep.point_power.is_zero()


def test_point_identity_with_rescaled_period():
    spec = cp_n_spec(2, omega0=3)
    rep = verify_point_identity(spec)
    assert rep.holds
    assert rep.alpha == LaurentElement.monomial(-6, -2, PeriodGroup([3]), 6)
    assert rep.alpha_degree == -12


@pytest.mark.parametrize(
    "n, N, mu, expected",
    [(2, 3, -2, 0), (2, 3, 2, 4), (1, 2, 1, 2)],
)
def test_orbit_class_degree(n, N, mu, expected):
    assert orbit_class_degree(n, N, mu) == expected


def test_orbit_class_slots():
    spec = cp_n_spec(2)
    assert [spec.basis[i][0] for i in slot_classes(spec, 0)] == ["[pt]"]
    assert [spec.basis[i][0] for i in slot_classes(spec, 4)] == ["[M]"]
    with pytest.raises(ParityViolation):
        orbit_class_degree(2, 3, 1)


def test_replay_examples():
    v = replay_theorem(2, 4, (1, 0, 1, 0, 1))
    assert v.status == "contradiction" and "N > n+1" in v.reason
    v = replay_theorem(2, 3, (1, 0, 2, 0, 1))
    assert v.status == "contradiction"
    assert v.violations == ((2, 2),) and (2, 1) in v.forced
    v = replay_theorem(3, 4, (1, 0, 1, 0, 1, 0, 1))
    assert v.consistent
    assert set(v.forced) == {(4, 1), (2, 1), (0, 1)}
    assert v.conclusion == "QH(M) = QH(CP^3)"


def test_replay_odd_betti_and_missing_u():
    v = replay_theorem(2, 3, (1, 3, 1, 0, 1))
    assert v.consistent and any("odd" in note for note in v.notes)
    v = replay_theorem(2, 3, (1, 0, 1, 0, 1))
    assert v.consistent
    v = replay_theorem(3, 4, (1, 0, 1, 0, 0, 0, 1))
    assert v.status == "contradiction" and "H_4" in v.reason


@pytest.mark.parametrize("betti", [(1, 0, 1), (0, 0, 1, 0, 1), (1, 0, 1, 0, 2), (1, -1, 1, 0, 1)])
def test_replay_malformed(betti):
    with pytest.raises(MalformedBetti):
        replay_theorem(2, 3, betti)


@pytest.mark.parametrize("n", range(1, 7))
def test_replay_over_range(n):
    assert replay_theorem(n, n + 1, cp_n_betti(n)).consistent
    for N in range(n + 2, 3 * n + 1):
        assert replay_theorem(n, N, cp_n_betti(n)).status == "contradiction"


def test_spec_serialization_round_trip():
    for spec in (cp_n_spec(1), cp_n_spec(3, omega0="1/2"), trivial_product_spec(2)):
        text = dumps_spec(spec)
        again = loads_spec(text)
        assert dumps_spec(again) == text
        assert verify_point_identity(again).holds == verify_point_identity(spec).holds


def test_graded_class_degree_of_mixed_class_raises():
    spec = cp_n_spec(2)
    mixed = spec.basis_class("u") + spec.point_class()
    with pytest.raises(ValueError):
        mixed.degree()
    assert GradedClass(spec, {}).degree() is None
    assert degree(power(spec, spec.point_class(), 3).components[0]) == -12

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lemma_oracle, scan_orbit_reverse
from toric_qh.errors import HorizonExceeded
from toric_qh.index_core import Partition, RotationNumbers, cz_index, decompose, is_extremal
from toric_qh.orbit_search import (
    TorusPoint,
    Window,
    certify_lemma_arithmetic,
    find_lemma_iterate,
    max_repetitions,
    orbit_hits,
    reduce_mod2,
)
from toric_qh.qh_engine import cp_n_spec, orbit_class_degree, power

F = Fraction


def test_torus_point_is_canonical():
    assert TorusPoint(["3", "-1", "5/2", "-7/3"]).coords == (F(-1), F(-1), F(1, 2), F(-1, 3))
    assert reduce_mod2(F(1)) == -1


def test_window_validation():
    with pytest.raises(ValueError):
        Window([("1/4", "1/4")])
    with pytest.raises(ValueError):
        Window([("-2", "0")])


@pytest.mark.parametrize(
    "theta, bounds, horizon, expected",
    [
        (["1/2"], [("-1/4", "1/4")], 8, [4, 8]),
        (["-1/100"], [("-1/10", "0")], 12, list(range(1, 10))),
        # brute force: only k = 12 brings both coordinates near 0
        (["1/3", "1/2"], [("-1/8", "1/8")] * 2, 12, [12]),
    ],
)
def test_orbit_hits_examples(theta, bounds, horizon, expected):
    assert scan_orbit_reverse(theta, bounds, horizon) == expected
    assert orbit_hits(TorusPoint(theta), Window(bounds), horizon) == expected


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.fractions(-3, 3, max_denominator=50), min_size=1, max_size=3),
    st.data(),
    st.integers(1, 300),
)
def test_orbit_hits_sound_and_complete(theta, data, horizon):
    bounds = []
    for _ in theta:
        a = data.draw(st.fractions(-1, F(9, 10), max_denominator=20))
        w = data.draw(st.integers(1, 40))
        b = min(F(1), a + F(w, 20))
        bounds.append((a, b))
    point, window = TorusPoint(theta), Window(bounds)
    hits = orbit_hits(point, window, horizon)
    assert all(window.contains(point.times(k)) for k in hits)
    assert hits == scan_orbit_reverse(theta, bounds, horizon)


def test_parallel_scan_matches_serial():
    point = TorusPoint(["-1/997", "3/1009"])
    window = Window([("0", "1/10"), ("-1/10", "1/10")])
    serial = orbit_hits(point, window, 40_000)
    assert orbit_hits(point, window, 40_000, workers=3) == serial


def test_lemma_single_block():
    w = find_lemma_iterate(RotationNumbers(["-1/100"]), N=2, horizon=300)
    assert (w.m, w.d, w.lambdas, w.r_max) == (199, 0, (F(1, 100),), 199)
    assert w.loop == -2 and w.mu_m == -1
    assert w.all_certified and len(w.certified_partitions) == 199
    assert lemma_oracle(["-1/100"], 2, 300)[0] == 199


def test_lemma_two_block():
    rho = ["-1/100", "-3/200"]
    w = find_lemma_iterate(RotationNumbers(rho), N=3, horizon=10**5)
    # The angles repeat with period 400 and the loop drops by 10 per period,
    # so the conditions mod 6 repeat after 1200 steps; 2400 is exhaustive.
    assert lemma_oracle(rho, 3, 2400) == (399, F(1, 64))
    assert (w.m, w.width) == (399, F(1, 64))
    assert w.loop == -4 + w.d and w.d % 6 == 0
    assert w.all_certified


def test_lemma_periodic_orbit_exhausts_horizon():
    with pytest.raises(HorizonExceeded) as info:
        find_lemma_iterate(RotationNumbers(["1/2"]), N=2, horizon=100)
    assert info.value.horizon == 100
    assert lemma_oracle(["1/2"], 2, 100) is None


def test_lemma_requires_large_chern_number():
    with pytest.raises(ValueError):
        find_lemma_iterate(RotationNumbers(["-1/100", "-3/200"]), N=2, horizon=100)


def test_max_repetitions():
    assert max_repetitions([F(1, 100)]) == 199
    assert max_repetitions([F(1, 2), F(1, 3)]) == 3
    assert max_repetitions([F(3, 7)]) == 4


@pytest.mark.parametrize("n, d, r", [(2, 6, 2), (1, 0, 1), (3, 8, 4)])
def test_certify_lemma_arithmetic_examples(n, d, r):
    assert certify_lemma_arithmetic(n, d, r)


@pytest.mark.parametrize("n, d, r, value", [(2, 6, 2, 6), (1, 0, 1, -1), (3, 8, 4, 11)])
def test_lemma_arithmetic_sides(n, d, r, value):
    assert r * (-n + d) - (r - 1) * n == value
    assert r * (-2 * n + d) + n == value


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.integers(1, 399).map(lambda p: F(-p, 400)), min_size=1, max_size=2),
    st.integers(0, 2),
)
def test_witness_validity(rho, extra):
    path = RotationNumbers(rho)
    n = path.n
    N = n + 1 + extra
    try:
        w = find_lemma_iterate(path, N, horizon=20_000)
    except HorizonExceeded:
        return
    split = decompose(path, w.m)
    assert split.loop == -2 * n + w.d and w.d % (2 * N) == 0
    assert all(lam > 0 for lam in w.lambdas)
    assert w.r_max >= 2 and w.r_max * max(w.lambdas) < 2 <= (w.r_max + 1) * max(w.lambdas)
    assert cz_index(path, w.m) == -n + w.d
    assert (cz_index(path, w.m) + n) % (2 * N) == 0
    for r in (1, 2, w.r_max):
        assert cz_index(path, r * w.m) == r * (-2 * n + w.d) + n
        assert is_extremal(path, Partition.uniform(w.m, r))
    assert w.all_certified
    assert orbit_class_degree(n, N, w.mu_m) == 0
    if N == n + 1:
        spec = cp_n_spec(n)
        assert not power(spec, spec.point_class(), w.r_max).is_zero()

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from artifact.seqcore import (
    BadParams,
    EvGeo,
    EvPow,
    EvZero,
    Geometric,
    HorizonExceeded,
    IntervalRat,
    NotMonotone,
    NotSummable,
    PowerLaw,
    Prefix,
    Spliced,
    am_means,
    ampliate,
    chi_prefix,
    eventual_le,
    finite,
    omega,
    rat,
    rat_str,
    reshape,
    scale,
    seq_from_json,
    seq_to_json,
    shift,
    star,
)


def harmonic(n):
    return sum((F(1, k) for k in range(1, n + 1)), F(0))


# -- examples ---------------------------------------------------------------

def test_term_examples():
    assert omega().term(3) == F(1, 3)
    assert Geometric(1, F(1, 2)).term(2) == F(1, 2)
    assert finite([3, 2, 1]).term(5) == 0


def test_partial_sum_examples():
    assert omega().partial_sum(3) == harmonic(3) == F(11, 6)
    assert omega().partial_sum(0) == 0
    assert finite([3, 2, 1]).partial_sum(0) == 0
    assert Geometric(1, F(1, 2)).partial_sum(3) == F(7, 4)


def test_tail_sum_examples():
    assert Geometric(1, F(1, 2)).tail_sum(3) == IntervalRat.point(F(1, 2))
    assert omega().tail_sum(1).is_divergent
    t = PowerLaw(1, 2).tail_sum(2)
    assert (t.lo, t.hi) == (F(1, 2), F(3, 4))


def test_power_law_tail_encloses_long_partial_sum():
    s = PowerLaw(1, 2)
    t = s.tail_sum(2, refine=50)
    head = sum(F(1, k * k) for k in range(2, 400))
    assert t.lo > head
    assert t.hi - t.lo <= F(1, 52 * 52)


def test_reshape_examples():
    sh = reshape("shift", omega(), 1)
    assert [sh.term(n) for n in (1, 2, 3)] == [F(1, 2), F(1, 3), F(1, 4)]
    assert list(reshape("star", [1, 3, 2]).values) == [3, 2, 1]
    a = reshape("ampliate", omega(), 2)
    assert [a.term(n) for n in range(1, 7)] == [1, 1, F(1, 2), F(1, 2), F(1, 3), F(1, 3)]
    c = reshape("chi_prefix", omega(), 2)
    assert [c.term(n) for n in (1, 2, 3)] == [1, F(1, 2), 0]
    with pytest.raises(BadParams):
        reshape("nope", omega(), 1)


def test_am_means_examples():
    assert am_means("am", finite([1]), 7) == F(1, 7)
    assert am_means("am", omega(), 3) == F(11, 18)
    assert am_means("am_inf", Geometric(1, F(1, 2)), 2) == IntervalRat.point(F(1, 4))
    with pytest.raises(NotSummable):
        am_means("am_inf", omega(), 2)


# -- constructors and errors -------------------------------------------------

def test_constructor_errors():
    with pytest.raises(NotMonotone):
        finite([1, 2])
    with pytest.raises(NotMonotone):
        finite([1, -1])
    with pytest.raises(BadParams):
        Geometric(1, 1)
    with pytest.raises(BadParams):
        PowerLaw(1, 0)
    with pytest.raises(NotMonotone):
        Spliced([F(1, 10)], 1, omega())
    with pytest.raises(BadParams):
        omega().term(0)


def test_prefix_is_not_extrapolated():
    p = Prefix([1, F(1, 2)])
    assert p.partial_sum(2) == F(3, 2)
    with pytest.raises(HorizonExceeded):
        p.term(3)
    assert p.total().is_unknown


def test_spliced_and_shift_forms():
    s = Spliced([F(2)], 1, omega())
    assert [s.term(n) for n in (1, 2, 3)] == [2, F(1, 2), F(1, 3)]
    assert s.partial_sum(3) == F(17, 6)
    assert eventual_le(shift(omega(), 1).form(), omega().form()) is not None


def test_scale_stays_in_family():
    assert scale(omega(), F(1, 2)) == PowerLaw(F(1, 2), 1)
    assert scale(Geometric(1, F(1, 3)), 3) == Geometric(3, F(1, 3))


def test_eventual_le_families():
    assert eventual_le(EvGeo(0, F(5), F(1, 2)), EvPow(0, F(1), 3, 0)) is not None
    assert eventual_le(EvPow(0, F(1), 3, 0), EvGeo(0, F(1), F(1, 2))) is None
    assert eventual_le(EvPow(0, F(1), 1, 0), EvPow(0, F(1), 2, 0)) is None
    assert eventual_le(EvZero(4), EvPow(0, F(1), 2, 0)) == 4


def test_rat_parsing():
    assert rat("3/6") == F(1, 2)
    assert rat("0.25") == F(1, 4)
    assert rat_str(F(-3, 4)) == "-3/4"
    assert rat_str(F(2)) == "2"


@pytest.mark.parametrize("s", [
    finite(["3", "2", "1"]), Geometric(1, F(1, 2)), omega(), PowerLaw(F(2, 3), 2),
    Prefix([1, F(1, 2)]), Spliced([F(3)], 1, omega()), ampliate(Geometric(1, F(1, 3)), 3),
])
def test_json_round_trip(s):
    d = seq_to_json(s)
    back = seq_from_json(d)
    assert seq_to_json(back) == d
    n = 2 if isinstance(s, Prefix) else 8
    assert [back.term(k) for k in range(1, n + 1)] == [s.term(k) for k in range(1, n + 1)]


# -- properties -------------------------------------------------------------

fracs = st.fractions(min_value=0, max_value=10, max_denominator=50)


@st.composite
def sequences(draw):
    kind = draw(st.sampled_from(["finite", "geo", "pow"]))
    if kind == "finite":
        vals = sorted(draw(st.lists(fracs, min_size=1, max_size=8)), reverse=True)
        return finite(vals)
    c = draw(st.fractions(min_value=F(1, 10), max_value=5, max_denominator=20))
    if kind == "geo":
        r = draw(st.fractions(min_value=F(1, 10), max_value=F(9, 10), max_denominator=20))
        return Geometric(c, r)
    return PowerLaw(c, draw(st.integers(1, 3)))


@settings(max_examples=60, deadline=None)
@given(sequences(), st.integers(1, 40))
def test_monotone_and_additive(s, n):
    assert s.term(n) >= s.term(n + 1) >= 0
    assert s.partial_sum(n + 1) - s.partial_sum(n) == s.term(n + 1)


@settings(max_examples=60, deadline=None)
@given(sequences(), st.integers(0, 30))
def test_tail_partial_consistency(s, n):
    T = s.tail_sum(1)
    if T.is_point:
        assert s.partial_sum(n) + s.tail_sum(n + 1).lo == T.lo


@settings(max_examples=60, deadline=None)
@given(st.lists(fracs, min_size=1, max_size=10))
def test_star_idempotent_and_sum_preserving(vals):
    s = star(vals)
    assert star(list(s.values)).values == s.values
    assert s.partial_sum(len(vals)) == sum(vals)


@settings(max_examples=30, deadline=None)
@given(sequences())
def test_am_is_nonincreasing(s):
    means = [am_means("am", s, n) for n in range(1, 1001)]
    assert all(a >= b for a, b in zip(means, means[1:]))


@settings(max_examples=30, deadline=None)
@given(sequences(), st.integers(1, 5), st.integers(1, 30))
def test_ampliate_partial_sums(s, m, n):
    a = ampliate(s, m)
    assert a.partial_sum(n) == sum(s.term(-(-k // m)) for k in range(1, n + 1))


def test_chi_prefix_is_finite():
    c = chi_prefix(omega(), 3)
    assert c.support() == 3

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from artifact.majorize import (
    at_inf,
    block,
    diff_limit,
    min_attainment,
    p_shift,
    relation,
    strong,
    strong_at_inf,
    weak,
)
from artifact.seqcore import (
    BadParams,
    Geometric,
    NotSummable,
    PowerLaw,
    Prefix,
    finite,
    omega,
    scale,
    shift,
)

HALF_OMEGA = scale(omega(), F(1, 2))


def test_relation_examples():
    v = relation("weak", finite([F(1, 2), F(1, 2)]), finite([1]))
    assert v.holds and v.cert.kind == "FiniteSupportExact"
    v = relation("weak", HALF_OMEGA, omega())
    assert v.holds and v.cert.kind == "HorizonPlusTermwiseTail"
    v = relation("strong", HALF_OMEGA, omega())
    assert v.fails and v.conclusive
    v = relation("strong_at_inf", finite([2, 1]), finite([2, 2]))
    assert v.fails


def test_weak_failure_witness_is_minimal():
    v = weak(finite([1]), finite([F(1, 2), F(1, 2)]))
    assert v.fails and v.witness_index == 1 and v.deficit == F(1, 2)
    v = weak(finite([2, 2, 2]), finite([3, 1, 1]))
    assert v.fails and v.witness_index == 3 and v.deficit == 1


def test_min_attainment_examples():
    v, n, val = min_attainment(omega(), omega(), 3)
    assert v.holds and (n, val) == (3, 0)
    v, n, val = min_attainment(finite([F(1, 2), F(1, 2)]), finite([1]), 1)
    assert v.holds and (n, val) == (2, 0)
    v, n, val = min_attainment(HALF_OMEGA, omega(), 1)
    assert v.holds and (n, val) == (1, F(1, 2))


def test_diff_limit_telescoping():
    d = diff_limit(shift(omega(), 1), omega())
    assert d.exact and d.value == 1
    assert diff_limit(HALF_OMEGA, omega()).kind == "diverges"


def test_block_finite_support():
    v = block(finite([F(1, 2), F(1, 2)]), finite([1]))
    assert v.holds and v.cert.kind == "BlockEquality"


def test_at_inf_needs_summable():
    with pytest.raises(NotSummable):
        at_inf(omega(), omega())


def test_at_inf_geometric():
    # tails of <1/2^n> from 1 against 2<1/2^n> dominate termwise
    v = at_inf(Geometric(1, F(1, 2)), Geometric(2, F(1, 2)))
    assert v.holds


def test_p_shift_examples():
    assert p_shift(shift(omega(), 1), omega(), 1).holds
    assert relation("p_shift(1)", shift(omega(), 1), omega()).holds
    with pytest.raises(BadParams):
        relation("p_shift", omega(), omega())


def test_prefix_data_never_fabricates_a_tail():
    v = weak(Prefix([F(1, 2), F(1, 2)]), Prefix([1, F(1, 2)]))
    assert not v.holds


def test_unknown_relation():
    with pytest.raises(BadParams):
        relation("nope", omega(), omega())


def test_power_laws_termwise():
    v = weak(PowerLaw(1, 2), omega())
    assert v.holds


# -- properties on random finite pairs --------------------------------------

fracs = st.fractions(min_value=0, max_value=5, max_denominator=12)


@st.composite
def finite_pairs(draw, equal_total=False):
    n = draw(st.integers(1, 7))
    x = sorted(draw(st.lists(fracs, min_size=n, max_size=n)), reverse=True)
    y = sorted(draw(st.lists(fracs, min_size=n, max_size=n)), reverse=True)
    if equal_total:
        gap = sum(x) - sum(y)
        if gap > 0:
            y[0] += gap
        else:
            x[0] -= gap
    return finite(x), finite(y)


@settings(max_examples=150, deadline=None)
@given(finite_pairs())
def test_implication_chain(pair):
    x, y = pair
    b, s, w = block(x, y), strong(x, y), weak(x, y)
    if b.holds:
        assert s.holds
    if s.holds:
        assert w.holds
    for v in (b, s, w):
        assert v.conclusive


@settings(max_examples=150, deadline=None)
@given(finite_pairs())
def test_failure_symmetry(pair):
    x, y = pair
    v = weak(x, y)
    if v.fails:
        n = v.witness_index
        assert x.partial_sum(n) > y.partial_sum(n)
        assert all(x.partial_sum(k) <= y.partial_sum(k) for k in range(1, n))


@settings(max_examples=150, deadline=None)
@given(finite_pairs(equal_total=True))
def test_summable_equivalence(pair):
    x, y = pair
    assert strong(x, y).holds == strong_at_inf(y, x).holds
    assert strong(y, x).holds == strong_at_inf(x, y).holds


@settings(max_examples=100, deadline=None)
@given(finite_pairs())
def test_p_shift_zero_agrees_with_weak(pair):
    x, y = pair
    assert p_shift(x, y, 0).status == weak(x, y).status

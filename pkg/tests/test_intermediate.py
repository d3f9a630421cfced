from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from artifact.canon import NotMajorized
from artifact.intermediate import (
    NotTailMajorized,
    clip,
    clip_threshold,
    f_at_inf,
    f_strong,
    f_strong_at_inf,
    f_weak,
    finite_intermediate,
    inf_intermediate,
    infinite_rho,
    infinite_zeta,
    rho_t_p_splice,
    rho_t_p_step,
)
from artifact.majorize import strong, weak
from artifact.seqcore import (
    BadParams,
    Geometric,
    NotSummable,
    PowerLaw,
    Spliced,
    finite,
    omega,
    scale,
    shift,
)

W = omega()
HALF_OMEGA = scale(W, F(1, 2))


def head(s, n=5):
    return [s.term(i) for i in range(1, n + 1)]


# -- finite kinds --------------------------------------------------------------

def test_finite_examples():
    assert finite_intermediate("A_i", [2, 1], [2, 2]) == [2, 1]
    assert finite_intermediate("A_ii", [2, 1], [2, 2]) == [2, 2]
    assert finite_intermediate("B_i", [2, 1], [2, 2]) == [2, 1]
    assert finite_intermediate("B_ii", [2, 1], [2, 2]) == [3, 1]
    assert finite_intermediate("A_i", [F(1, 2), F(1, 2)], [1, 0]) == [1, 0]
    assert finite_intermediate("A_ii", [F(1, 2), F(1, 2)], [1, 0]) == [F(1, 2), F(1, 2)]
    assert finite_intermediate("B_ii", [1, 0], [1, 1]) == [2, 0]


def test_finite_errors():
    with pytest.raises(NotMajorized):
        finite_intermediate("A_i", [3, 0], [2, 2])
    with pytest.raises(NotMajorized):
        finite_intermediate("B_i", [1, 1], [2, 0])
    with pytest.raises(BadParams):
        finite_intermediate("A_i", [1], [1, 1])
    with pytest.raises(BadParams):
        finite_intermediate("C", [1], [1])
    with pytest.raises(BadParams):
        finite_intermediate("A_i", [1, 2], [2, 2])


fracs = st.fractions(0, 6, max_denominator=8)


@st.composite
def dominated_pairs(draw):
    """(x, y) with y >= x termwise after sorting, so both relations hold."""
    n = draw(st.integers(1, 7))
    x = sorted(draw(st.lists(fracs, min_size=n, max_size=n)), reverse=True)
    d = draw(st.lists(fracs, min_size=n, max_size=n))
    y = sorted((a + b for a, b in zip(x, d)), reverse=True)
    return x, y


@st.composite
def weak_pairs(draw):
    n = draw(st.integers(1, 7))
    x = sorted(draw(st.lists(fracs, min_size=n, max_size=n)), reverse=True)
    y = sorted(draw(st.lists(fracs, min_size=n, max_size=n)), reverse=True)
    return x, y


def _check_kind(kind, x, y, out):
    assert len(out) == len(x)
    assert all(a >= b for a, b in zip(out, out[1:])) and all(v >= 0 for v in out)
    if kind == "A_i":
        assert f_strong(x, out) and all(a <= b for a, b in zip(out, y))
    elif kind == "A_ii":
        assert f_strong(out, y) and all(a <= b for a, b in zip(x, out))
    elif kind == "B_i":
        assert f_strong_at_inf(x, out) and all(a <= b for a, b in zip(out, y))
    else:
        assert f_strong_at_inf(out, y) and all(a <= b for a, b in zip(x, out))


@settings(max_examples=80, deadline=None)
@given(st.one_of(dominated_pairs(), weak_pairs()), st.sampled_from(["A_i", "A_ii", "B_i", "B_ii"]))
def test_finite_outputs_satisfy_their_relations(pair, kind):
    x, y = pair
    applicable = f_weak(x, y) if kind.startswith("A") else f_at_inf(x, y)
    if not applicable:
        with pytest.raises(NotMajorized):
            finite_intermediate(kind, x, y)
        return
    _check_kind(kind, x, y, finite_intermediate(kind, x, y))


# -- clip threshold -------------------------------------------------------------

def test_clip_threshold_examples():
    ct = clip_threshold(finite([F(1, 2), F(1, 2)]), finite([1]))
    assert (ct.t1, ct.N1, ct.conclusive) == (1, 1, True)
    ct = clip_threshold(HALF_OMEGA, W)
    assert (ct.t1, ct.N1, ct.conclusive) == (F(1, 2), 2, True)
    c = clip(W, F(1, 2))
    assert head(c, 4) == [F(1, 2), F(1, 2), F(1, 3), F(1, 4)]
    with pytest.raises(NotMajorized):
        clip_threshold(finite([2]), finite([1]))


# -- infinite zeta and rho ---------------------------------------------------------

def test_equal_sequences_collapse():
    z = infinite_zeta(W, W)
    r = infinite_rho(W, W)
    assert z.branch == r.branch == "alpha_zero"
    assert z.seq is W and r.seq is W


def test_summable_xi_clips_eta():
    r = infinite_zeta(Geometric(1, F(1, 2)), W)
    assert r.branch == "summable_clip" and r.conclusive
    assert head(r.seq) == [1, F(1, 2), F(1, 3), F(1, 6), 0]


@pytest.mark.parametrize("xi", [HALF_OMEGA, shift(W, 1)])
def test_block_constructions_are_verified(xi):
    z = infinite_zeta(xi, W)
    assert z.branch == "block_splice" and z.conclusive
    assert strong(xi, z.seq).holds
    r = infinite_rho(xi, W)
    assert r.branch == "block_fan" and r.conclusive
    assert strong(r.seq, W).holds and weak(xi, r.seq).holds


def test_nonattaining_pair():
    # eta = <2, 1/4, 1/5, ...>: the difference sums decrease to 1/6 without reaching it
    eta = Spliced([2], 1, shift(W, 2))
    z = infinite_zeta(W, eta)
    assert z.branch == "clip_iteration" and z.conclusive
    assert head(z.seq, 3) == [F(11, 6), F(1, 4), F(1, 5)]
    r = infinite_rho(W, eta)
    assert r.branch == "nonattaining_bump" and r.conclusive
    assert head(r.seq, 3) == [F(7, 6), F(1, 2), F(1, 3)]


def test_infinite_rejects_non_majorized():
    with pytest.raises(NotMajorized):
        infinite_zeta(W, HALF_OMEGA)
    with pytest.raises(NotMajorized):
        infinite_rho(W, HALF_OMEGA)


# -- majorization at infinity -----------------------------------------------------

def test_rho_t_p_step_examples():
    assert rho_t_p_step([1, 1, 1], [3, 0, 0]) == (1, 3, 1)
    assert rho_t_p_step([2, 1, 1], [2, 2, 0]) == (2, 2, 2)
    assert rho_t_p_step([2, 1], [2, 1]) is None
    assert rho_t_p_splice(finite([1, 1, 1]), finite([3]), 3) == ([3], [(1, 3, 1)])


def test_inf_intermediate_examples():
    g = Geometric(1, F(1, 2))
    r = inf_intermediate("zeta", finite([2]), g)
    assert r.branch == "tail_split" and r.conclusive
    assert head(r.seq, 3) == [1, F(1, 2), F(1, 4)]
    r = inf_intermediate("rho", finite([1]), g)
    assert r.branch == "first_entry_bump" and head(r.seq, 2) == [2, 0]
    r = inf_intermediate("rho", g, Geometric(2, F(1, 2)))
    assert head(r.seq, 2) == [3, F(1, 2)]
    r = inf_intermediate("zeta", g, Geometric(2, F(1, 2)))
    assert r.branch == "termwise" and r.seq is g


def test_inf_intermediate_errors():
    with pytest.raises(NotSummable):
        inf_intermediate("zeta", PowerLaw(1, 3), PowerLaw(1, 2))
    with pytest.raises(NotTailMajorized):
        inf_intermediate("zeta", Geometric(1, F(1, 2)), finite([2]))
    with pytest.raises(BadParams):
        inf_intermediate("nope", finite([1]), finite([1]))

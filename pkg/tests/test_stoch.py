import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from artifact.seqcore import BadParams, Geometric, finite, omega, star
from artifact.stoch import (
    NegativeEntry,
    RationalMatTrunc,
    SignedSqrtMat,
    apply,
    birkhoff_decompose,
    classify,
    conjugate_diagonal_check,
    direct_sum,
    embed,
    ex_2_11,
    ex_6_11,
    gen_example,
    is_orthogonal,
    lemma_2_12_profile,
    mat_from_json,
    orthogonality_defect,
    orthostochastic_decide_small,
    perm_matrix,
    recompose,
    remark_2_6_matrix,
    remark_2_9_matrix,
    schur_square,
    to_csv,
    v_transform,
)

HALF = RationalMatTrunc.from_dense([[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]])


def ents(M):
    return {k: v for k, v in M.entries.items()}


# -- T-transform blocks ------------------------------------------------------

def test_v_transform_examples():
    assert ents(v_transform(1, F(1, 2))) == {(1, 1): (1, F(1, 2)), (1, 2): (-1, F(1, 2)),
                                            (2, 1): (1, F(1, 2)), (2, 2): (1, F(1, 2))}
    assert ents(v_transform(1, 1)) == ents(SignedSqrtMat.identity(2))
    V = v_transform(2, F(1, 3))
    assert [V.entries.get((1, j)) for j in (1, 2, 3)] == [None, (1, F(1, 3)), (-1, F(2, 3))]
    assert is_orthogonal(V)


def test_schur_square_examples():
    assert schur_square(v_transform(1, F(1, 2))).dense() == HALF.dense()
    assert schur_square(SignedSqrtMat.identity(3)).dense() == RationalMatTrunc.identity(3).dense()
    assert schur_square(v_transform(2, F(1, 3))).dense()[0] == [0, F(1, 3), F(2, 3)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 3), st.fractions(F(1, 9), 1, max_denominator=9)), min_size=1, max_size=4))
def test_v_chains_orthogonal_and_doubly_stochastic(chain):
    N = len(chain) + 4
    W = SignedSqrtMat.identity(N)
    for k, (m, t) in enumerate(chain, start=1):
        W = embed(v_transform(m, t), k - 1, N) @ W
    assert is_orthogonal(W)
    assert classify(schur_square(W)).doubly_stochastic


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.fractions(F(1, 9), 1, max_denominator=9), st.integers(1, 3),
       st.fractions(F(1, 9), 1, max_denominator=9))
def test_schur_square_multiplicative_on_disjoint_supports(m1, t1, m2, t2):
    # consecutive steps of the construction: each (i, j) meets at most one k
    N = m1 + m2 + 2
    A = embed(v_transform(m2, t2), 1, N)
    B = embed(v_transform(m1, t1), 0, N)
    prod_ok = True
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            ks = [k for k in range(1, N + 1) if (i, k) in A.entries and (k, j) in B.entries]
            prod_ok &= len(ks) <= 1
    if prod_ok:
        lhs = schur_square(A @ B).dense()
        sa, sb = schur_square(A).dense(), schur_square(B).dense()
        rhs = [[sum(sa[i][k] * sb[k][j] for k in range(N)) for j in range(N)] for i in range(N)]
        assert lhs == rhs


# -- classification and action ----------------------------------------------

def test_classify_examples():
    c = classify(remark_2_9_matrix(3))
    assert c.column_stochastic and not c.row_stochastic
    assert classify(HALF).doubly_stochastic
    ds = direct_sum([([1, 2], [1, 2], HALF), ([3, 4], [3, 4], HALF)])
    c = classify(ds)
    assert c.block_doubly and c.blocks == [(1, 2), (3, 4)]


def test_negative_entry_rejected():
    with pytest.raises(NegativeEntry):
        RationalMatTrunc(1, 1, {(1, 1): F(-1)})


def test_apply_examples():
    assert apply(RationalMatTrunc.identity(3), omega(), 3) == [1, F(1, 2), F(1, 3)]
    assert apply(remark_2_9_matrix(10), Geometric(1, F(1, 2)), 1)[0] == F(1, 2)
    assert apply(HALF, finite([1]), 2) == [F(1, 2), F(1, 2)]


def test_conjugate_diagonal_examples():
    V = v_transform(1, F(1, 2))
    assert conjugate_diagonal_check(V, finite([1]), finite([F(1, 2), F(1, 2)]), 2).holds
    assert conjugate_diagonal_check(SignedSqrtMat.identity(3), omega(), omega(), 3).holds
    v = conjugate_diagonal_check(V, finite([1]), finite([1]), 2)
    assert v.fails and v.witness_index == 1


# -- Birkhoff ---------------------------------------------------------------

def _all_perm_decompositions(P, N):
    """Oracle: permutations supported on the positive entries of P."""
    dense = P.dense()
    return [p for p in itertools.permutations(range(1, N + 1))
            if all(dense[i][p[i] - 1] > 0 for i in range(N))]


def test_birkhoff_examples():
    assert birkhoff_decompose(HALF) == [(F(1, 2), (1, 2)), (F(1, 2), (2, 1))]
    assert birkhoff_decompose(RationalMatTrunc.identity(3)) == [(1, (1, 2, 3))]
    P = remark_2_6_matrix()
    terms = birkhoff_decompose(P)
    # only two permutations fit inside the support, and both are transpositions
    assert sorted(p for _, p in terms) == sorted(_all_perm_decompositions(P, 3))
    assert [w for w, _ in terms] == [F(1, 2), F(1, 2)]
    assert recompose(terms, 3).dense() == P.dense()


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10 ** 6))
def test_birkhoff_reconstructs(N, seed):
    rng = random.Random(seed)
    k = rng.randint(1, 6)
    ws = [F(rng.randint(1, 9)) for _ in range(k)]
    tot = sum(ws)
    terms = [(w / tot, tuple(rng.sample(range(1, N + 1), N))) for w in ws]
    P = recompose(terms, N)
    out = birkhoff_decompose(P)
    assert recompose(out, N).dense() == P.dense()
    assert len(out) <= (N - 1) ** 2 + 1


def test_perm_matrix():
    assert perm_matrix([2, 1]).dense() == [[0, 1], [1, 0]]


# -- orthostochastic oracle ---------------------------------------------------

def test_orthostochastic_examples():
    assert orthostochastic_decide_small(remark_2_6_matrix()) is None
    U = orthostochastic_decide_small(RationalMatTrunc.identity(3))
    assert U is not None and schur_square(U).dense() == RationalMatTrunc.identity(3).dense()


@settings(max_examples=30, deadline=None)
@given(st.fractions(0, 1, max_denominator=30))
def test_every_2x2_is_orthostochastic(t):
    Q = RationalMatTrunc.from_dense([[t, 1 - t], [1 - t, t]])
    U = orthostochastic_decide_small(Q)
    assert U is not None and is_orthogonal(U) and schur_square(U).dense() == Q.dense()


# -- examples and direct sums -----------------------------------------------

def test_square_index_example_first_rows():
    U = ex_2_11(1)
    assert ents(U) == {(1, 1): (1, F(1, 2)), (1, 4): (1, F(1, 2)),
                       (2, 1): (1, F(1, 2)), (2, 4): (-1, F(1, 2))}
    Q = schur_square(ex_2_11(30))
    assert all(s == 1 for s in Q.row_sums()[:60])
    assert not orthogonality_defect(ex_2_11(30))


def test_lower_zero_example_entries():
    a = Geometric(F(1, 2), F(1, 2))
    U = gen_example("ex_6_11", a, 3)
    assert [U.entries[(i, 1)] for i in (1, 2, 3)] == [(1, F(1, 2)), (1, F(1, 4)), (1, F(1, 8))]
    assert all(U.entries.get((i, j)) is None for i in range(1, 4) for j in range(2, i))
    # columns 2..N are finitely supported and exactly orthonormal
    assert orthogonality_defect(ex_6_11(a, 6).transpose()) == [(1, 1)]
    with pytest.raises(BadParams):
        ex_6_11(Geometric(1, F(1, 2)), 3)


def test_direct_sum_examples():
    one = RationalMatTrunc.identity(1)
    sw = direct_sum([([1], [2], one), ([2], [1], one)])
    assert sw.dense() == [[0, 1], [1, 0]]
    assert direct_sum([([1, 2], [1, 2], HALF)]).dense() == HALF.dense()
    inter = direct_sum([([1, 3], [1, 3], HALF), ([2, 4], [2, 4], HALF)])
    assert classify(inter).doubly_stochastic


def test_profile_examples():
    assert lemma_2_12_profile(RationalMatTrunc.identity(3), 3) == [0, 0, 0]
    one = RationalMatTrunc.identity(1)
    sw = direct_sum([([1], [2], one), ([2], [1], one)])
    assert lemma_2_12_profile(sw, 2) == [1, 0]
    ds = direct_sum([([1, 2], [1, 2], HALF), ([3, 4], [3, 4], HALF)])
    assert lemma_2_12_profile(ds, 4) == [F(1, 2), 0, F(1, 2), 0]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_markus_inequality(seed):
    rng = random.Random(seed)
    N = rng.randint(2, 5)
    terms = [(F(1, 3), tuple(rng.sample(range(1, N + 1), N))) for _ in range(2)]
    P = recompose(terms, N)  # substochastic: total weight 2/3
    eta = finite(sorted((F(rng.randint(0, 9), rng.randint(1, 5)) for _ in range(N)), reverse=True))
    image = star(apply(P, eta, N))
    for n in range(1, N + 1):
        assert image.partial_sum(n) <= eta.partial_sum(n)


def test_matrix_json_and_csv():
    M = schur_square(v_transform(2, F(1, 3)))
    assert mat_from_json(M.to_json()).dense() == M.dense()
    U = v_transform(1, F(1, 2))
    assert ents(mat_from_json(U.to_json())) == ents(U)
    assert to_csv(M).splitlines()[0] == "0,1/3,2/3"
    assert to_csv(U).splitlines()[1].startswith("0.707106781186548")
